use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not in SL(n,R): det = {det}")]
    NotInGroup { det: f64 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("aliasing: {nodes} quadrature nodes given, at least {required} required")]
    Aliasing { nodes: usize, required: usize },
    #[error("grid error: {0}")]
    Grid(String),
}
