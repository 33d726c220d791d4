//! Parsing of backend, element and measure specifications.

use hyperwalk::walk::{uniform_generators, FiniteMeasure};
use hyperwalk::{FreeGroup, Mobius, Plane, PointedAction, Word};

use crate::error::{config_error, CliError};

pub enum Backend {
    Free(FreeGroup),
    Sl2(Plane),
}

impl Backend {
    pub fn parse(spec: &str) -> Result<Backend, CliError> {
        let spec = spec.trim();
        if spec == "sl2" {
            return Ok(Backend::Sl2(Plane::new()));
        }
        let q = spec
            .strip_prefix("free:q=")
            .and_then(|k| k.parse::<usize>().ok())
            .ok_or_else(|| config_error(format!("unknown backend {spec:?}; use free:q=K or sl2")))?;
        Ok(Backend::Free(FreeGroup::new(q)?))
    }

    pub fn name(&self) -> String {
        match self {
            Backend::Free(g) => format!("free:q={}", g.rank()),
            Backend::Sl2(_) => "sl2".into(),
        }
    }
}

/// Run `$body` with `$space` bound to the concrete backend.
macro_rules! with_backend {
    ($backend:expr, $space:ident => $body:expr) => {
        match $backend {
            $crate::backend::Backend::Free($space) => $body,
            $crate::backend::Backend::Sl2($space) => $body,
        }
    };
}
pub(crate) use with_backend;

/// Element syntax of a backend.
pub trait ParseElement: PointedAction<Element: PartialEq> {
    fn parse_element(&self, s: &str) -> Result<Self::Element, CliError>;

    /// An atom with an optional `@p` probability.
    fn parse_atom(&self, s: &str) -> Result<(Self::Element, Option<f64>), CliError>;

    fn label(&self, g: &Self::Element) -> String;

    fn generators(&self) -> Result<FiniteMeasure<Self::Element>, CliError>;

    fn parse_elements(&self, list: &[String]) -> Result<Vec<Self::Element>, CliError> {
        list.iter().map(|s| self.parse_element(s)).collect()
    }

    fn parse_measure(&self, spec: &str) -> Result<FiniteMeasure<Self::Element>, CliError> {
        let spec = spec.trim();
        if spec == "uniform-gens" {
            return self.generators();
        }
        let items = |body: &str| -> Vec<String> {
            body.split(';').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
        };
        if let Some(atom) = spec.strip_prefix("point:") {
            return Ok(FiniteMeasure::point_mass(self.parse_element(atom)?));
        }
        if let Some(body) = spec.strip_prefix("uniform:") {
            return Ok(FiniteMeasure::uniform(self.parse_elements(&items(body))?)?);
        }
        if let Some(body) = spec.strip_prefix("atoms:") {
            let atoms = items(body)
                .iter()
                .map(|a| match self.parse_atom(a)? {
                    (g, Some(p)) => Ok((g, p)),
                    (_, None) => Err(config_error(format!("atom {a:?} needs a probability (@p)"))),
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            return Ok(FiniteMeasure::new(atoms)?);
        }
        Err(config_error(format!(
            "unknown measure {spec:?}; use uniform-gens, point:<atom>, uniform:<atoms> or atoms:<atom>@<p>;…"
        )))
    }
}

impl ParseElement for FreeGroup {
    fn parse_element(&self, s: &str) -> Result<Word, CliError> {
        Ok(self.word(s)?)
    }

    fn parse_atom(&self, s: &str) -> Result<(Word, Option<f64>), CliError> {
        match s.split_once('@') {
            Some((w, p)) => {
                let p = p
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| config_error(format!("bad probability in atom {s:?}")))?;
                Ok((self.parse_element(w)?, Some(p)))
            }
            None => Ok((self.parse_element(s)?, None)),
        }
    }

    fn label(&self, g: &Word) -> String {
        g.to_string()
    }

    fn generators(&self) -> Result<FiniteMeasure<Word>, CliError> {
        Ok(uniform_generators(self))
    }
}

impl ParseElement for Plane {
    fn parse_element(&self, s: &str) -> Result<Mobius, CliError> {
        Ok(s.parse()?)
    }

    fn parse_atom(&self, s: &str) -> Result<(Mobius, Option<f64>), CliError> {
        Ok(Mobius::parse_atom(s)?)
    }

    fn label(&self, g: &Mobius) -> String {
        let [a, b, c, d] = g.to_matrix();
        format!("{a},{b},{c},{d}")
    }

    fn generators(&self) -> Result<FiniteMeasure<Mobius>, CliError> {
        Err(config_error("the sl2 backend has no generators; give --measure explicitly"))
    }
}
