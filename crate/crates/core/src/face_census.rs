//! Brute-force survival census of cross-polytope faces under Gaussian
//! projections, optionally restricted to structured supports.

use std::fmt;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::l1lab::{face_survives, gaussian_instance, Face};
use crate::models::{
    block_subspace_count, simple_face_count, unrank_combination, BlockFamily, Count, ProblemSize, TreeFamily,
};
use crate::seeding;

/// Faces per instance above which a census must subsample.
pub const FACE_ENUMERATION_LIMIT: u128 = 1_000_000;

/// Which supports a census looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceRestriction {
    All,
    /// Supports made of exactly this many runs.
    BlockSupports(usize),
    /// Rooted connected subtrees of the heap-ordered tree on `0..N`.
    TreeSupports,
}

impl fmt::Display for FaceRestriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceRestriction::All => write!(f, "all"),
            FaceRestriction::BlockSupports(c) => write!(f, "block:{c}"),
            FaceRestriction::TreeSupports => write!(f, "tree"),
        }
    }
}

/// Ranked access to the faces of one `(N, k, restriction)` family.
///
/// Rank `r` maps to support rank `r >> (k + 1)` and sign mask
/// `r & (2^(k+1) - 1)`, bit `i` set meaning a negative sign on the `i`-th
/// smallest support index.
#[derive(Debug, Clone)]
pub struct FaceFamily {
    ambient: usize,
    support_len: usize,
    supports: u128,
    kind: SupportKind,
}

#[derive(Debug, Clone)]
enum SupportKind {
    All,
    Block(BlockFamily),
    Tree(TreeFamily),
}

impl FaceFamily {
    pub fn new(ambient: usize, k: usize, restriction: FaceRestriction) -> Result<Self> {
        let support_len = k + 1;
        if support_len > ambient {
            return domain(format!("k-face with k = {k} needs N > k, got N = {ambient}"));
        }
        if support_len > 126 {
            return Err(Error::Guard { what: format!("{k}-faces"), limit: 125 });
        }
        let (supports, kind) = match restriction {
            FaceRestriction::All => {
                let c = crate::models::binomial_u128(ambient as u64, support_len as u64)
                    .ok_or_else(|| Error::Guard { what: format!("C({ambient}, {support_len})"), limit: u128::MAX })?;
                (c, SupportKind::All)
            }
            FaceRestriction::BlockSupports(c) => {
                let fam = BlockFamily::new(ambient, support_len, c)?;
                (fam.count(), SupportKind::Block(fam))
            }
            FaceRestriction::TreeSupports => {
                let fam = TreeFamily::new(ambient, support_len)?;
                let total = fam.count().exact().ok_or_else(|| Error::Guard {
                    what: format!("subtrees of size {support_len} on {ambient} nodes"),
                    limit: u128::MAX,
                })?;
                (total, SupportKind::Tree(fam))
            }
        };
        if supports.leading_zeros() < support_len as u32 {
            return Err(Error::Guard { what: format!("{k}-face count"), limit: u128::MAX });
        }
        Ok(FaceFamily { ambient, support_len, supports, kind })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn supports(&self) -> u128 {
        self.supports
    }

    /// Number of signed faces.
    pub fn len(&self) -> u128 {
        self.supports << self.support_len
    }

    pub fn is_empty(&self) -> bool {
        self.supports == 0
    }

    pub fn support(&self, rank: u128) -> Vec<usize> {
        match &self.kind {
            SupportKind::All => unrank_combination(self.ambient, self.support_len, rank),
            SupportKind::Block(fam) => fam.pattern(rank).support(),
            SupportKind::Tree(fam) => fam.support(rank).expect("rank below count").nodes().to_vec(),
        }
    }

    pub fn face(&self, rank: u128) -> Face {
        assert!(rank < self.len(), "face rank out of range");
        let mask = rank & ((1u128 << self.support_len) - 1);
        let support = self.support(rank >> self.support_len);
        let signs = (0..self.support_len).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        Face::new(support, signs).expect("family faces are valid")
    }
}

/// Number of signed `k`-faces in the family.
pub fn face_count(ambient: usize, k: usize, restriction: FaceRestriction) -> Result<Count> {
    let signs = if k + 1 < 128 {
        Count::Exact(1u128 << (k + 1))
    } else {
        Count::Overflow { ln: (k + 1) as f64 * std::f64::consts::LN_2 }
    };
    match restriction {
        FaceRestriction::All => simple_face_count(ambient, k),
        FaceRestriction::BlockSupports(c) => Ok(block_subspace_count(ambient, k + 1, c)?.mul(signs)),
        FaceRestriction::TreeSupports => Ok(TreeFamily::new(ambient, k + 1)?.count().mul(signs)),
    }
}

/// Streams every face of the family once, in rank order.
pub fn enumerate_faces(ambient: usize, k: usize, restriction: FaceRestriction) -> Result<impl Iterator<Item = Face>> {
    let family = FaceFamily::new(ambient, k, restriction)?;
    if family.len() > FACE_ENUMERATION_LIMIT {
        return Err(Error::Guard { what: format!("enumerating {} faces", family.len()), limit: FACE_ENUMERATION_LIMIT });
    }
    Ok((0..family.len()).map(move |r| family.face(r)))
}

/// One census: a face family tested against a batch of seeded instances.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusSpec {
    pub ambient: usize,
    pub measurements: usize,
    /// Face dimension `k` (supports have `k + 1` indices).
    pub face_dim: usize,
    pub restriction: FaceRestriction,
    pub instances: usize,
    pub seed: u64,
    /// Faces sampled per instance; `None` means exhaustive.
    pub subsample: Option<usize>,
}

impl CensusSpec {
    pub fn new(ambient: usize, measurements: usize, face_dim: usize, restriction: FaceRestriction) -> Self {
        CensusSpec { ambient, measurements, face_dim, restriction, instances: 100, seed: 42, subsample: None }
    }

    pub fn instances(mut self, instances: usize) -> Self {
        self.instances = instances;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn subsample(mut self, cap: usize) -> Self {
        self.subsample = Some(cap);
        self
    }
}

/// Seed of the `i`-th census instance; shared by every restriction.
pub fn instance_seed(master: u64, index: usize) -> u64 {
    seeding::mix(master, &[index as u64])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceTally {
    pub examined: u64,
    pub survived: u64,
    /// Faces whose test failed numerically; excluded from the counts.
    pub errors: u64,
}

impl InstanceTally {
    pub fn loss_fraction(&self) -> f64 {
        if self.examined == 0 {
            0.0
        } else {
            1.0 - self.survived as f64 / self.examined as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusResult {
    pub spec: CensusSpec,
    pub faces_examined: u64,
    pub survived: u64,
    pub loss_fraction: f64,
    pub stderr: f64,
    pub per_instance: Vec<InstanceTally>,
    pub errors: u64,
    /// Every face was tested (no subsampling).
    pub exhaustive: bool,
}

/// Tests the spec's faces on every instance.
pub fn run_census(spec: &CensusSpec) -> Result<CensusResult> {
    if spec.instances == 0 {
        return domain("census needs at least one instance");
    }
    let size = ProblemSize::new(spec.ambient, spec.measurements, 0)?;
    let family = FaceFamily::new(spec.ambient, spec.face_dim, spec.restriction)?;
    let total = family.len();
    let cap = spec.subsample.map(|c| c as u128);
    let exhaustive = match cap {
        Some(c) => total <= c,
        None if total <= FACE_ENUMERATION_LIMIT => true,
        None => {
            return Err(Error::Guard { what: format!("census of {total} faces without a subsample cap"), limit: FACE_ENUMERATION_LIMIT })
        }
    };
    let universe = usize::try_from(total).map_err(|_| Error::Guard { what: "face count".into(), limit: usize::MAX as u128 })?;

    let per_instance: Vec<InstanceTally> = (0..spec.instances)
        .into_par_iter()
        .map(|i| {
            let seed = instance_seed(spec.seed, i);
            let inst = gaussian_instance(size, seed);
            let ranks: Vec<u128> = if exhaustive {
                (0..total).collect()
            } else {
                let mut rng = seeding::rng(seeding::mix(seed, &[1]));
                let m = cap.unwrap_or(0) as usize;
                let mut picked = sample(&mut rng, universe, m).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(|r| r as u128).collect()
            };
            let (survived, errors) = ranks
                .par_iter()
                .map(|&r| match face_survives(&inst, &family.face(r)) {
                    Ok(v) => (u64::from(v.survives), 0u64),
                    Err(_) => (0, 1),
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            InstanceTally { examined: ranks.len() as u64 - errors, survived, errors }
        })
        .collect();

    let faces_examined: u64 = per_instance.iter().map(|t| t.examined).sum();
    let survived: u64 = per_instance.iter().map(|t| t.survived).sum();
    let errors: u64 = per_instance.iter().map(|t| t.errors).sum();
    let loss_fraction = if faces_examined == 0 { 0.0 } else { 1.0 - survived as f64 / faces_examined as f64 };
    let fractions: Vec<f64> = per_instance.iter().map(InstanceTally::loss_fraction).collect();
    let stderr = if fractions.len() > 1 {
        mean_and_sd(&fractions).1 / (fractions.len() as f64).sqrt()
    } else if faces_examined > 0 {
        (loss_fraction * (1.0 - loss_fraction) / faces_examined as f64).sqrt()
    } else {
        0.0
    };
    Ok(CensusResult { spec: spec.clone(), faces_examined, survived, loss_fraction, stderr, per_instance, errors, exhaustive })
}

fn mean_and_sd(v: &[f64]) -> (f64, f64) {
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt())
}

/// Paired census of all faces against block-restricted faces.
#[derive(Debug, Clone, PartialEq)]
pub struct LossComparison {
    pub all: CensusResult,
    pub block: CensusResult,
    /// Mean per-instance difference (all minus block).
    pub mean_difference: f64,
    pub z: f64,
    pub pass: bool,
}

/// `|z|` at or below this passes.
pub const COMPARISON_Z_LIMIT: f64 = 3.0;

/// Loss fractions of all faces and of `C`-run block faces on the same
/// instances, with a paired z statistic on the per-instance differences.
pub fn compare_loss_fractions(size: ProblemSize, k: usize, clusters: usize, instances: usize, seed: u64) -> Result<LossComparison> {
    let base = CensusSpec::new(size.ambient, size.measurements, k, FaceRestriction::All).instances(instances).seed(seed);
    let all = run_census(&base)?;
    let block = run_census(&CensusSpec { restriction: FaceRestriction::BlockSupports(clusters), ..base })?;
    let diffs: Vec<f64> = all
        .per_instance
        .iter()
        .zip(&block.per_instance)
        .map(|(a, b)| a.loss_fraction() - b.loss_fraction())
        .collect();
    let (mean, sd) = mean_and_sd(&diffs);
    let z = if sd > 0.0 {
        mean / (sd / (diffs.len() as f64).sqrt())
    } else if mean == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(mean)
    };
    Ok(LossComparison { all, block, mean_difference: mean, z, pass: z.abs() <= COMPARISON_Z_LIMIT })
}
