use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::centered_uniform;

/// Strong and weak coupling energies of a clean dimerized chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingScale {
    pub big_delta: f64,
    pub delta: f64,
}

impl CouplingScale {
    pub fn new(big_delta: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::param(
                "delta",
                format!("must be positive, got {delta}"),
            ));
        }
        if !(big_delta.is_finite() && big_delta > delta) {
            return Err(Error::param(
                "big_delta",
                format!("must exceed delta ({delta}), got {big_delta}"),
            ));
        }
        Ok(CouplingScale { big_delta, delta })
    }

    /// Δ = 1, δ = 0.1.
    pub fn standard() -> Self {
        CouplingScale {
            big_delta: 1.0,
            delta: 0.1,
        }
    }
}

impl Default for CouplingScale {
    fn default() -> Self {
        Self::standard()
    }
}

/// Parameters of a nearest-neighbour XX chain in the excitation picture.
///
/// Energies are in units of the strong coupling. The defect indices are
/// 0-based; `site_b` is absent for chains without a middle defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChainSpec", into = "RawChainSpec")]
pub struct ChainSpec {
    n_sites: usize,
    couplings: Vec<f64>,
    onsite: Vec<f64>,
    site_a: Option<usize>,
    site_b: Option<usize>,
    site_c: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChainSpec {
    n_sites: usize,
    couplings: Vec<f64>,
    onsite: Vec<f64>,
    site_a: Option<usize>,
    #[serde(default)]
    site_b: Option<usize>,
    site_c: Option<usize>,
}

impl TryFrom<RawChainSpec> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawChainSpec) -> Result<Self> {
        ChainSpec::new(
            raw.n_sites,
            raw.couplings,
            raw.onsite,
            raw.site_a,
            raw.site_b,
            raw.site_c,
        )
    }
}

impl From<ChainSpec> for RawChainSpec {
    fn from(spec: ChainSpec) -> Self {
        RawChainSpec {
            n_sites: spec.n_sites,
            couplings: spec.couplings,
            onsite: spec.onsite,
            site_a: spec.site_a,
            site_b: spec.site_b,
            site_c: spec.site_c,
        }
    }
}

impl ChainSpec {
    pub fn new(
        n_sites: usize,
        couplings: Vec<f64>,
        onsite: Vec<f64>,
        site_a: Option<usize>,
        site_b: Option<usize>,
        site_c: Option<usize>,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::param("n_sites", "must be at least 1"));
        }
        if couplings.len() != n_sites - 1 {
            return Err(Error::param(
                "couplings",
                format!("expected {} bonds, got {}", n_sites - 1, couplings.len()),
            ));
        }
        if onsite.len() != n_sites {
            return Err(Error::param(
                "onsite",
                format!("expected {n_sites} energies, got {}", onsite.len()),
            ));
        }
        if couplings.iter().chain(&onsite).any(|x| !x.is_finite()) {
            return Err(Error::param("couplings", "energies must be finite"));
        }
        let defects: Vec<usize> = [site_a, site_b, site_c].into_iter().flatten().collect();
        if let Some(&bad) = defects.iter().find(|&&s| s >= n_sites) {
            return Err(Error::SiteOutOfRange {
                index: bad,
                n_sites,
            });
        }
        if defects.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param(
                "site_b",
                format!("defect sites must be strictly ascending, got {defects:?}"),
            ));
        }
        Ok(ChainSpec {
            n_sites,
            couplings,
            onsite,
            site_a,
            site_b,
            site_c,
        })
    }

    /// Uniform chain with zero on-site energies and no defect labels.
    pub fn uniform(couplings: Vec<f64>) -> Result<Self> {
        let n = couplings.len() + 1;
        Self::new(n, couplings, vec![0.0; n], None, None, None)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn site_a(&self) -> Option<usize> {
        self.site_a
    }

    pub fn site_b(&self) -> Option<usize> {
        self.site_b
    }

    pub fn site_c(&self) -> Option<usize> {
        self.site_c
    }

    /// The two end defects used for injection, or an error if either is missing.
    pub fn injection_sites(&self) -> Result<(usize, usize)> {
        match (self.site_a, self.site_c) {
            (Some(a), Some(c)) => Ok((a, c)),
            _ => Err(Error::param(
                "site_a",
                "protocol requires both defect sites A and C",
            )),
        }
    }

    pub fn with_defects(
        mut self,
        site_a: Option<usize>,
        site_b: Option<usize>,
        site_c: Option<usize>,
    ) -> Result<Self> {
        self.site_a = site_a;
        self.site_b = site_b;
        self.site_c = site_c;
        Self::new(
            self.n_sites,
            self.couplings,
            self.onsite,
            self.site_a,
            self.site_b,
            self.site_c,
        )
    }

    /// Site relabelling `i -> N-1-i`.
    pub fn mirrored(&self) -> ChainSpec {
        let n = self.n_sites;
        let flip = |s: Option<usize>| s.map(|i| n - 1 - i);
        ChainSpec {
            n_sites: n,
            couplings: self.couplings.iter().rev().copied().collect(),
            onsite: self.onsite.iter().rev().copied().collect(),
            site_a: flip(self.site_c),
            site_b: flip(self.site_b),
            site_c: flip(self.site_a),
        }
    }

    /// Contiguous piece of the chain; defect labels inside the range are kept.
    pub fn sub_chain(&self, start: usize, len: usize) -> Result<ChainSpec> {
        if len == 0 || start + len > self.n_sites {
            return Err(Error::param(
                "len",
                format!("range {start}..{} not inside the chain", start + len),
            ));
        }
        let local = |s: Option<usize>| {
            s.filter(|&i| (start..start + len).contains(&i))
                .map(|i| i - start)
        };
        ChainSpec::new(
            len,
            self.couplings[start..start + len - 1].to_vec(),
            self.onsite[start..start + len].to_vec(),
            local(self.site_a),
            local(self.site_b),
            local(self.site_c),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain spec serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Symmetric three-defect chain of `7 + 4m` sites.
///
/// Defects sit at both ends and at the centre; each extension step adds one
/// dimer on either side of the centre.
pub fn build_abc_chain(extension_m: usize, scale: CouplingScale) -> Result<ChainSpec> {
    let CouplingScale { big_delta, delta } = CouplingScale::new(scale.big_delta, scale.delta)?;
    let mut left = vec![delta];
    for _ in 0..=extension_m {
        left.push(big_delta);
        left.push(delta);
    }
    let half = left.len();
    let mut couplings = left.clone();
    couplings.extend(left.iter().rev());
    let n = couplings.len() + 1;
    ChainSpec::new(n, couplings, vec![0.0; n], Some(0), Some(half), Some(n - 1))
}

/// Eleven-site chain with dimers at both edges: defects at 2, 5 and 8.
pub fn build_storage_chain(scale: CouplingScale) -> Result<ChainSpec> {
    let CouplingScale {
        big_delta: s,
        delta: w,
    } = CouplingScale::new(scale.big_delta, scale.delta)?;
    let couplings = vec![s, w, w, s, w, w, s, w, w, s];
    ChainSpec::new(11, couplings, vec![0.0; 11], Some(2), Some(5), Some(8))
}

/// Three sites with equal couplings `eta`; defects at 0, 1, 2.
pub fn build_trimer(eta: f64) -> Result<ChainSpec> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be positive, got {eta}")));
    }
    ChainSpec::new(3, vec![eta, eta], vec![0.0; 3], Some(0), Some(1), Some(2))
}

fn check_scale(scale_e: f64, delta: f64) -> Result<()> {
    if !(scale_e.is_finite() && scale_e >= 0.0) {
        return Err(Error::param(
            "scale_e",
            format!("must be non-negative, got {scale_e}"),
        ));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::param(
            "delta",
            format!("must be positive, got {delta}"),
        ));
    }
    Ok(())
}

/// On-site disorder `ε_i = E·d_i·δ`, one draw per site in ascending order.
///
/// Existing on-site energies are replaced.
pub fn apply_diagonal_disorder<R: RngCore + ?Sized>(
    spec: &ChainSpec,
    scale_e: f64,
    delta: f64,
    rng: &mut R,
) -> Result<ChainSpec> {
    check_scale(scale_e, delta)?;
    let mut out = spec.clone();
    for e in out.onsite.iter_mut() {
        *e = scale_e * centered_uniform(rng) * delta;
    }
    Ok(out)
}

/// Coupling disorder `J_i + E·d_i·δ`, one draw per bond in ascending order.
///
/// Sign flips of weak bonds are kept as sampled.
pub fn apply_offdiagonal_disorder<R: RngCore + ?Sized>(
    spec: &ChainSpec,
    scale_e: f64,
    delta: f64,
    rng: &mut R,
) -> Result<ChainSpec> {
    check_scale(scale_e, delta)?;
    let mut out = spec.clone();
    for j in out.couplings.iter_mut() {
        *j += scale_e * centered_uniform(rng) * delta;
    }
    Ok(out)
}

/// Sets every bond touching `site` to exactly zero.
pub fn decouple_site(spec: &ChainSpec, site: usize) -> Result<ChainSpec> {
    if site >= spec.n_sites {
        return Err(Error::SiteOutOfRange {
            index: site,
            n_sites: spec.n_sites,
        });
    }
    let mut out = spec.clone();
    if site > 0 {
        out.couplings[site - 1] = 0.0;
    }
    if site + 1 < spec.n_sites {
        out.couplings[site] = 0.0;
    }
    Ok(out)
}
