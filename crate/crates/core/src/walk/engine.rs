use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FiniteMeasure;
use crate::error::{invalid, Error, Result};
use crate::space::{gromov_product, stable_length, Length, PointedAction};

/// Samples per RNG stream unless configured otherwise.
pub const DEFAULT_CHUNK_SIZE: u64 = 4096;

/// A Monte Carlo run: `samples` independent trajectories of length
/// `horizon`. Chunk `c` covers samples `c·chunk_size ..` and draws from the
/// ChaCha8 stream `c` of the master seed, so results never depend on how
/// many workers execute the chunks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkRun {
    pub horizon: usize,
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "default_chunk")]
    pub chunk_size: u64,
}

fn default_chunk() -> u64 {
    DEFAULT_CHUNK_SIZE
}

impl WalkRun {
    pub fn new(horizon: usize, samples: u64, seed: u64) -> Result<Self> {
        let run = WalkRun {
            horizon,
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
        };
        run.validate()?;
        Ok(run)
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Result<Self> {
        self.chunk_size = chunk_size;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(invalid("walk horizon must be >= 1"));
        }
        if self.samples == 0 {
            return Err(invalid("walk needs at least one sample"));
        }
        if self.chunk_size == 0 {
            return Err(invalid("chunk size must be >= 1"));
        }
        Ok(())
    }

    pub fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(self.chunk_size)
    }
}

/// The random stream for one chunk.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// One chunk's share of a run.
pub struct Chunk {
    pub index: u64,
    pub first_sample: u64,
    pub len: u64,
    pub rng: ChaCha8Rng,
}

/// Evaluate `work` on every chunk and return the results in chunk order.
/// `workers = None` uses the global thread pool.
pub fn map_chunks<R, F>(run: &WalkRun, workers: Option<usize>, work: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(Chunk) -> Result<R> + Sync + Send,
{
    run.validate()?;
    let chunks = run.chunk_count();
    let job = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let first = c * run.chunk_size;
                work(Chunk {
                    index: c,
                    first_sample: first,
                    len: run.chunk_size.min(run.samples - first),
                    rng: chunk_rng(run.seed, c),
                })
            })
            .collect::<Result<Vec<R>>>()
    };
    match workers {
        None => job(),
        Some(0) => Err(invalid("worker count must be >= 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(job),
    }
}

/// `γ_0 = e, γ_1, …, γ_n`, with `γ_k = γ_{k−1}·ω_k`.
pub fn sample_path<A: PointedAction, R: rand::Rng + ?Sized>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    n: usize,
    rng: &mut R,
) -> Vec<A::Element> {
    let mut path = Vec::with_capacity(n + 1);
    let mut g = space.identity();
    path.push(g.clone());
    for _ in 0..n {
        space.right_multiply(&mut g, measure.sample(rng));
        path.push(g.clone());
    }
    path
}

/// `γ_n` alone.
pub fn sample_endpoint<A: PointedAction, R: rand::Rng + ?Sized>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    n: usize,
    rng: &mut R,
) -> A::Element {
    let mut g = space.identity();
    for _ in 0..n {
        space.right_multiply(&mut g, measure.sample(rng));
    }
    g
}

/// Which per-sample observables [`simulate`] records beyond `d` and `τ`.
#[derive(Clone, Debug)]
pub struct Observables<P> {
    /// Evaluate the stable-length bracket of `γ_n` over this many powers.
    pub ell_n_max: Option<u64>,
    /// Record `(z_n, x)_{z0}` for each listed point `x`.
    pub gromov_points: Vec<P>,
}

impl<P> Default for Observables<P> {
    fn default() -> Self {
        Observables {
            ell_n_max: None,
            gromov_points: Vec::new(),
        }
    }
}

/// One trajectory's observables at the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: u64,
    pub n: usize,
    pub d: Length,
    pub tau: Length,
    pub ell_lo: Option<Length>,
    pub ell_hi: Option<Length>,
    pub extra: Vec<Length>,
}

/// Run independent trajectories and record their observables, in sample
/// order.
pub fn simulate<A: PointedAction>(
    space: &A,
    measure: &FiniteMeasure<A::Element>,
    run: &WalkRun,
    observables: &Observables<A::Point>,
    workers: Option<usize>,
) -> Result<Vec<SampleRecord>> {
    let z0 = space.basepoint();
    let chunks = map_chunks(run, workers, |mut chunk| {
        let mut out = Vec::with_capacity(chunk.len as usize);
        for s in 0..chunk.len {
            let sample_id = chunk.first_sample + s;
            let with_id = |e: Error| Error::Sample {
                sample: sample_id,
                source: Box::new(e),
            };
            let g = sample_endpoint(space, measure, run.horizon, &mut chunk.rng);
            let zn = space.orbit(&g).map_err(with_id)?;
            let (ell_lo, ell_hi) = match observables.ell_n_max {
                Some(n_max) => {
                    let sl = stable_length(space, &g, n_max).map_err(with_id)?;
                    (
                        Some(sl.inf_term.min(sl.last_term)),
                        Some(sl.inf_term.max(sl.last_term)),
                    )
                }
                None => (None, None),
            };
            out.push(SampleRecord {
                sample_id,
                n: run.horizon,
                d: space.dist(&z0, &zn),
                tau: space.translation_length(&g),
                ell_lo,
                ell_hi,
                extra: observables
                    .gromov_points
                    .iter()
                    .map(|x| gromov_product(space, &zn, x, &z0))
                    .collect(),
            });
        }
        Ok(out)
    })?;
    Ok(chunks.into_iter().flatten().collect())
}
