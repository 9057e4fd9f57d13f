use thiserror::Error;

use crate::walk::Site;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary: max |C†C - I| = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("state is not normalized: squared norm = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("site ({}, {}) lies outside the admissible support: {reason}", site.x, site.y)]
    Support { site: Site, reason: String },

    #[error("frequency collision between {} site pair(s): {}", pairs.len(), format_pairs(pairs))]
    Collision { pairs: Vec<(Site, Site)> },

    #[error("no lattice site decodes frequency {frequency}")]
    Undecodable { frequency: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_pairs(pairs: &[(Site, Site)]) -> String {
    const SHOWN: usize = 8;
    let mut out = pairs
        .iter()
        .take(SHOWN)
        .map(|(a, b)| format!("({},{})~({},{})", a.x, a.y, b.x, b.y))
        .collect::<Vec<_>>()
        .join(", ");
    if pairs.len() > SHOWN {
        out.push_str(&format!(", ... {} more", pairs.len() - SHOWN));
    }
    out
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
