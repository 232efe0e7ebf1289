//! File formats: binary PGM images, CSMX sensing matrices, and the plain
//! CSV layouts for vectors, datasets, templates and regression problems.

mod csmx;
mod pgm;
mod text;

pub use csmx::{read_csmx, write_csmx, CSMX_HEADER_LEN, CSMX_MAGIC, CSMX_VERSION};
pub use pgm::{decode_pgm, encode_pgm, load_pgm, save_pgm};
pub use text::{
    format_dataset, format_templates, format_vector, load_pgm_dir, parse_dataset, parse_regression,
    parse_templates, parse_vector, read_dataset, read_regression, read_templates, read_vector,
    write_templates, write_vector,
};
