//! CSV layouts, all without header rows and with `.` decimals:
//!
//! * vector: one value per line.
//! * dataset: `label,v1,…,vn` per sample.
//! * templates: `class,v1,…,vn` per class.
//! * regression: `x1,…,xp,y` per observation.
//! * image labels: `file.pgm,label` per image.
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! write-then-read is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::regression::RegressionProblem;
use crate::sensing::Signal;
use crate::smashed::ClassTemplates;

use super::load_pgm;

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn number(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("line {line}: not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Format(format!("line {line}: non-finite value")));
    }
    Ok(v)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    lines(text).map(|(i, l)| number(l, i)).collect()
}

pub fn format_vector(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        writeln!(out, "{v}").expect("string write");
    }
    out
}

fn labelled_rows(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    lines(text)
        .map(|(i, l)| {
            let mut parts = l.split(',');
            let label = parts.next().unwrap_or_default().trim().to_string();
            if label.is_empty() {
                return Err(Error::Format(format!("line {i}: empty label")));
            }
            let values = parts.map(|p| number(p, i)).collect::<Result<Vec<_>>>()?;
            if values.is_empty() {
                return Err(Error::Format(format!("line {i}: no values")));
            }
            Ok((label, values))
        })
        .collect()
}

pub fn parse_dataset(text: &str) -> Result<Vec<Signal>> {
    labelled_rows(text)?
        .into_iter()
        .map(|(label, values)| Ok(Signal::new(values)?.with_label(label)))
        .collect()
}

pub fn format_dataset(samples: &[Signal]) -> Result<String> {
    let mut out = String::new();
    for (i, s) in samples.iter().enumerate() {
        let label = s
            .label
            .as_deref()
            .ok_or_else(|| Error::InvalidDataset(format!("sample {i} has no label")))?;
        write_row(&mut out, label, &s.values);
    }
    Ok(out)
}

fn write_row(out: &mut String, label: &str, values: &[f64]) {
    out.push_str(label);
    for v in values {
        write!(out, ",{v}").expect("string write");
    }
    out.push('\n');
}

pub fn parse_templates(text: &str) -> Result<ClassTemplates> {
    let (classes, templates) = labelled_rows(text)?.into_iter().unzip();
    ClassTemplates::new(classes, templates)
}

pub fn format_templates(templates: &ClassTemplates) -> String {
    let mut out = String::new();
    for (c, t) in templates.classes().iter().zip(templates.templates()) {
        write_row(&mut out, c, t);
    }
    out
}

pub fn parse_regression(text: &str) -> Result<RegressionProblem> {
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (i, l) in lines(text) {
        let mut values = l
            .split(',')
            .map(|p| number(p, i))
            .collect::<Result<Vec<_>>>()?;
        if values.len() < 2 {
            return Err(Error::Format(format!(
                "line {i}: need predictors and a response"
            )));
        }
        y.push(values.pop().expect("non-empty"));
        rows.push(values);
    }
    RegressionProblem::new(&rows, y)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

pub fn write_vector(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    fs::write(path, format_vector(values))?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<Signal>> {
    parse_dataset(&fs::read_to_string(path)?)
}

pub fn read_templates(path: impl AsRef<Path>) -> Result<ClassTemplates> {
    parse_templates(&fs::read_to_string(path)?)
}

pub fn write_templates(path: impl AsRef<Path>, templates: &ClassTemplates) -> Result<()> {
    fs::write(path, format_templates(templates))?;
    Ok(())
}

pub fn read_regression(path: impl AsRef<Path>) -> Result<RegressionProblem> {
    parse_regression(&fs::read_to_string(path)?)
}

/// Labelled images listed in `labels_csv` (`file,label`, paths relative to
/// `dir`), in file order. Every image must share one shape.
pub fn load_pgm_dir(dir: impl AsRef<Path>, labels_csv: impl AsRef<Path>) -> Result<Vec<Signal>> {
    let dir = dir.as_ref();
    let text = fs::read_to_string(labels_csv)?;
    let mut out: Vec<Signal> = Vec::new();
    for (i, l) in lines(&text) {
        let (file, label) = l
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("line {i}: expected file,label")))?;
        let img = load_pgm(dir.join(file.trim()))?;
        let sig = Signal::image(img.height(), img.width(), img.pixels().to_vec())?
            .with_label(label.trim());
        if let Some(first) = out.first() {
            if first.shape != sig.shape {
                return Err(Error::InvalidDataset(format!(
                    "{file}: image shape differs from the first image"
                )));
            }
        }
        out.push(sig);
    }
    if out.is_empty() {
        return Err(Error::InvalidDataset("no images listed".into()));
    }
    Ok(out)
}
