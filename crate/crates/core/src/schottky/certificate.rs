use serde::Serialize;

/// How a certificate was obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    /// Exhaustive over every pair of vertices of the tree.
    TreeExact { depth: usize, nodes: u64 },
    /// Sampled pairs only; not a proof.
    Sampled { trials: u64 },
}

/// A pair attaining the worst failure count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Any `y` with this prefix fails for the counted elements.
    pub y_class: String,
    /// The `z` (tree: the exact vertex, or a prefix all of whose
    /// extensions behave alike).
    pub z_class: String,
}

/// Evidence for or against the Schottky property of a set `S` with constant
/// `C`: at most `⌊|S|/3⌋` elements `s` may have `(y, s·z)_{z0} > C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchottkyCertificate {
    pub backend: String,
    pub elements: Vec<String>,
    pub constant: f64,
    pub mode: Mode,
    pub worst_failures: usize,
    pub allowed_failures: usize,
    pub worst_fraction: f64,
    pub witness: Option<Witness>,
    pub valid: bool,
}

impl SchottkyCertificate {
    pub(crate) fn assemble(
        backend: impl Into<String>,
        elements: Vec<String>,
        constant: f64,
        mode: Mode,
        worst_failures: usize,
        witness: Option<Witness>,
    ) -> Self {
        let size = elements.len();
        let allowed = allowed_failures(size);
        SchottkyCertificate {
            backend: backend.into(),
            elements,
            constant,
            mode,
            worst_failures,
            allowed_failures: allowed,
            worst_fraction: worst_failures as f64 / size as f64,
            witness,
            valid: worst_failures <= allowed,
        }
    }
}

/// `⌊|S|/3⌋`.
pub fn allowed_failures(size: usize) -> usize {
    size / 3
}
