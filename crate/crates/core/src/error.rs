use crate::C64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice basis: {0}")]
    Orientation(String),

    #[error("singular curve: discriminant g2^3 - 27 g3^2 = {discriminant} vanishes")]
    SingularCurve { discriminant: C64 },

    #[error("argument {z} lies on the pole set ({what})")]
    Pole { z: C64, what: &'static str },

    #[error("extension parameter q = {q} lies in the period lattice")]
    DegenerateExtension { q: C64 },

    #[error("point ({x}, {y}) is not on the curve (residual {residual:e})")]
    NotOnCurve { x: C64, y: C64, residual: f64 },

    #[error("path error: {0}")]
    Path(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("component (j={j}, i={i}, k={k}): {source}")]
    Component {
        j: usize,
        i: usize,
        k: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn component(j: usize, i: usize, k: usize, source: Error) -> Self {
        Error::Component {
            j: j + 1,
            i: i + 1,
            k: k + 1,
            source: Box::new(source),
        }
    }
}
