//! Physical and numerical parameters, and the single validation gate every
//! simulation passes through.
//!
//! All quantities are dimensionless: the kick period is 1, so bath kernels
//! are evaluated at `t = 1` once per kick.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_KICK: f64 = 3.5;
pub const DEFAULT_HBAR: f64 = 0.46;
pub const DEFAULT_ETA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 0.1;
/// ω_c defaults to this constant divided by ħ.
pub const DEFAULT_OMEGA_C_TIMES_HBAR: f64 = 5.0;
pub const DEFAULT_KICKS: usize = 100;
pub const DEFAULT_NQ: usize = 256;
pub const DEFAULT_BAND_TOL: f64 = 1e-16;
pub const DEFAULT_EIG_FLOOR: f64 = 1e-14;
pub const DEFAULT_PRODUCT_TOL: f64 = 1e-12;

/// Extra Bessel orders kept beyond K/ħ in the kick band.
pub const BAND_MARGIN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorParams {
    /// Kick strength K.
    pub kick: f64,
    /// Effective Planck constant ħ.
    pub hbar: f64,
}

impl Default for RotorParams {
    fn default() -> Self {
        Self {
            kick: DEFAULT_KICK,
            hbar: DEFAULT_HBAR,
        }
    }
}

impl RotorParams {
    /// Dimensionless Bessel argument K/ħ.
    pub fn kappa(&self) -> f64 {
        self.kick / self.hbar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    /// Coupling strength η. Zero disables the bath.
    pub eta: f64,
    /// Spectral cutoff ω_c.
    pub omega_c: f64,
    /// Inverse temperature β.
    pub beta: f64,
    /// Coupling slope φ'; 1 for φ(p) = p.
    pub phi_prime: f64,
}

impl BathParams {
    /// Defaults tied to ħ: η = 1, ω_c = 5/ħ, β = 0.1, φ' = 1.
    pub fn for_hbar(hbar: f64) -> Self {
        Self {
            eta: DEFAULT_ETA,
            omega_c: DEFAULT_OMEGA_C_TIMES_HBAR / hbar,
            beta: DEFAULT_BETA,
            phi_prime: 1.0,
        }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn is_disabled(&self) -> bool {
        self.eta == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsParams {
    /// Momentum basis is l ∈ [−l_max, l_max].
    pub l_max: usize,
    pub nq: usize,
    pub np_grid: usize,
    /// Half-width of the p grid around its center.
    pub p_extent: f64,
    pub band_tol: f64,
    pub eig_floor: f64,
    pub product_tol: f64,
}

impl NumericsParams {
    /// Sizes the basis and the phase-space grid for `kicks` kicks of a packet
    /// centred at momentum `p_center`.
    ///
    /// The momentum spread after n kicks is about (K/√2)√n, so the basis
    /// covers the larger of 1.5·(K/ħ + 40)·√n and eight diffusive widths plus
    /// one kick band; the p grid covers seven widths plus one kick and 10ħ,
    /// sampled at ħ/4.
    pub fn auto(rotor: &RotorParams, kicks: usize, p_center: f64) -> Self {
        let kappa = rotor.kappa().abs();
        let n = kicks.max(1) as f64;
        let l0 = (p_center / rotor.hbar).abs().ceil() as usize;
        let band = kappa.ceil() as usize + BAND_MARGIN;
        let heuristic = (1.5 * (kappa + BAND_MARGIN as f64) * n.sqrt()).ceil() as usize;
        let sigma_l = kappa * (n / 2.0).sqrt() + 1.0;
        let diffusive = band + (8.0 * sigma_l).ceil() as usize;
        let l_max = l0 + heuristic.max(diffusive).max(12);

        let p_extent = 7.0 * (rotor.kick.abs() / 2f64.sqrt()) * n.sqrt()
            + rotor.kick.abs()
            + 10.0 * rotor.hbar;
        let dp = rotor.hbar / 4.0;
        let np_grid = ((2.0 * p_extent / dp).ceil() as usize + 1).max(64);

        Self {
            l_max,
            nq: DEFAULT_NQ,
            np_grid,
            p_extent,
            band_tol: DEFAULT_BAND_TOL,
            eig_floor: DEFAULT_EIG_FLOOR,
            product_tol: DEFAULT_PRODUCT_TOL,
        }
    }
}

/// Run-level settings: number of kicks and the initial packet centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub kicks: usize,
    pub p_center: f64,
    pub q_center: f64,
}

impl RunParams {
    /// Packet centred at q = 0, p = πħ.
    pub fn centered(kicks: usize, hbar: f64) -> Self {
        Self {
            kicks,
            p_center: PI * hbar,
            q_center: 0.0,
        }
    }
}

/// A violated parameter invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveKick(f64),
    NonPositiveHbar(f64),
    NegativeEta(f64),
    NonPositiveOmegaC(f64),
    NonPositiveBeta(f64),
    NonFinite(&'static str),
    LMaxTooSmall(usize),
    GridTooSmall { name: &'static str, value: usize },
    NonPositivePExtent(f64),
    ToleranceOutOfRange { name: &'static str, value: f64 },
    NoKicks,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveKick(k) => write!(f, "K must be positive (got {k})"),
            Violation::NonPositiveHbar(h) => write!(f, "hbar must be positive (got {h})"),
            Violation::NegativeEta(e) => write!(f, "eta must be non-negative (got {e})"),
            Violation::NonPositiveOmegaC(w) => write!(f, "omega_c must be positive (got {w})"),
            Violation::NonPositiveBeta(b) => write!(f, "beta must be positive (got {b})"),
            Violation::NonFinite(name) => write!(f, "{name} must be finite"),
            Violation::LMaxTooSmall(l) => write!(f, "l_max must be at least 1 (got {l})"),
            Violation::GridTooSmall { name, value } => {
                write!(f, "{name} must be at least 8 (got {value})")
            }
            Violation::NonPositivePExtent(p) => write!(f, "p_extent must be positive (got {p})"),
            Violation::ToleranceOutOfRange { name, value } => {
                write!(f, "{name} must lie in (0, 1) (got {value})")
            }
            Violation::NoKicks => write!(f, "kicks must be at least 1"),
        }
    }
}

/// Informational flags attached to an accepted configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigNote {
    BathDisabled,
    KickDisabled,
}

impl fmt::Display for ConfigNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigNote::BathDisabled => f.write_str("bath disabled"),
            ConfigNote::KickDisabled => f.write_str("kick disabled"),
        }
    }
}

/// An accepted parameter set. Only [`validate`] constructs one, so downstream
/// code never re-checks physical ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    rotor: RotorParams,
    bath: BathParams,
    numerics: NumericsParams,
    run: RunParams,
    notes: Vec<ConfigNote>,
}

impl ValidatedConfig {
    pub fn rotor(&self) -> &RotorParams {
        &self.rotor
    }
    pub fn bath(&self) -> &BathParams {
        &self.bath
    }
    pub fn numerics(&self) -> &NumericsParams {
        &self.numerics
    }
    pub fn run(&self) -> &RunParams {
        &self.run
    }
    pub fn kicks(&self) -> usize {
        self.run.kicks
    }
    pub fn notes(&self) -> &[ConfigNote] {
        &self.notes
    }

    pub fn into_parts(self) -> (RotorParams, BathParams, NumericsParams, RunParams) {
        (self.rotor, self.bath, self.numerics, self.run)
    }
}

/// Checks every invariant and collects all violations at once.
pub fn validate(
    rotor: RotorParams,
    bath: BathParams,
    numerics: NumericsParams,
    run: RunParams,
) -> Result<ValidatedConfig> {
    let mut bad = Vec::new();

    let finite = [
        ("K", rotor.kick),
        ("hbar", rotor.hbar),
        ("eta", bath.eta),
        ("omega_c", bath.omega_c),
        ("beta", bath.beta),
        ("phi_prime", bath.phi_prime),
        ("p_extent", numerics.p_extent),
        ("p_center", run.p_center),
        ("q_center", run.q_center),
    ];
    for (name, v) in finite {
        if !v.is_finite() {
            bad.push(Violation::NonFinite(name));
        }
    }

    // K = 0 is kept as the kick-free limit and flagged below.
    if !(rotor.kick >= 0.0) {
        bad.push(Violation::NonPositiveKick(rotor.kick));
    }
    if !(rotor.hbar > 0.0) {
        bad.push(Violation::NonPositiveHbar(rotor.hbar));
    }
    if bath.eta < 0.0 {
        bad.push(Violation::NegativeEta(bath.eta));
    }
    if !(bath.omega_c > 0.0) {
        bad.push(Violation::NonPositiveOmegaC(bath.omega_c));
    }
    if !(bath.beta > 0.0) {
        bad.push(Violation::NonPositiveBeta(bath.beta));
    }
    if numerics.l_max < 1 {
        bad.push(Violation::LMaxTooSmall(numerics.l_max));
    }
    for (name, value) in [("nq", numerics.nq), ("np_grid", numerics.np_grid)] {
        if value < 8 {
            bad.push(Violation::GridTooSmall { name, value });
        }
    }
    if !(numerics.p_extent > 0.0) {
        bad.push(Violation::NonPositivePExtent(numerics.p_extent));
    }
    for (name, value) in [
        ("band_tol", numerics.band_tol),
        ("eig_floor", numerics.eig_floor),
        ("product_tol", numerics.product_tol),
    ] {
        if !(value > 0.0 && value < 1.0) {
            bad.push(Violation::ToleranceOutOfRange { name, value });
        }
    }
    if run.kicks == 0 {
        bad.push(Violation::NoKicks);
    }

    if !bad.is_empty() {
        return Err(Error::Config(bad));
    }

    let mut notes = Vec::new();
    if rotor.kick == 0.0 {
        notes.push(ConfigNote::KickDisabled);
    }
    if bath.is_disabled() {
        notes.push(ConfigNote::BathDisabled);
    }
    Ok(ValidatedConfig {
        rotor,
        bath,
        numerics,
        run,
        notes,
    })
}

/// Partially specified configuration, as read from a key-value file and
/// overridden by command-line flags. Unset keys take the documented defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(rename = "K", alias = "k", skip_serializing_if = "Option::is_none")]
    pub kick: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kicks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nq: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub np_grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_extent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eig_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RawConfig {
    /// Values set in `other` win.
    pub fn merged(&self, other: &RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            kick,
            hbar,
            eta,
            omega_c,
            beta,
            phi_prime,
            kicks,
            p_center,
            q_center,
            l_max,
            nq,
            np_grid,
            p_extent,
            band_tol,
            eig_floor,
            product_tol,
            seed
        )
    }

    /// Fills defaults and validates. ω_c defaults to 5/ħ of the resolved ħ;
    /// grid and basis sizes default to [`NumericsParams::auto`].
    pub fn resolve(&self) -> Result<ValidatedConfig> {
        let rotor = RotorParams {
            kick: self.kick.unwrap_or(DEFAULT_KICK),
            hbar: self.hbar.unwrap_or(DEFAULT_HBAR),
        };
        let base = BathParams::for_hbar(rotor.hbar);
        let bath = BathParams {
            eta: self.eta.unwrap_or(base.eta),
            omega_c: self.omega_c.unwrap_or(base.omega_c),
            beta: self.beta.unwrap_or(base.beta),
            phi_prime: self.phi_prime.unwrap_or(base.phi_prime),
        };
        let kicks = self.kicks.unwrap_or(DEFAULT_KICKS);
        let run = RunParams {
            kicks,
            p_center: self.p_center.unwrap_or(PI * rotor.hbar),
            q_center: self.q_center.unwrap_or(0.0),
        };
        let auto = if rotor.hbar > 0.0 && rotor.hbar.is_finite() && rotor.kick.is_finite() {
            NumericsParams::auto(&rotor, kicks, run.p_center)
        } else {
            NumericsParams::auto(&RotorParams::default(), kicks, 0.0)
        };
        let numerics = NumericsParams {
            l_max: self.l_max.unwrap_or(auto.l_max),
            nq: self.nq.unwrap_or(auto.nq),
            np_grid: self.np_grid.unwrap_or(auto.np_grid),
            p_extent: self.p_extent.unwrap_or(auto.p_extent),
            band_tol: self.band_tol.unwrap_or(auto.band_tol),
            eig_floor: self.eig_floor.unwrap_or(auto.eig_floor),
            product_tol: self.product_tol.unwrap_or(auto.product_tol),
        };
        validate(rotor, bath, numerics, run)
    }

    /// Snapshot of a validated configuration with every key set.
    pub fn from_validated(cfg: &ValidatedConfig, seed: Option<u64>) -> RawConfig {
        let (r, b, n, run) = cfg.clone().into_parts();
        RawConfig {
            kick: Some(r.kick),
            hbar: Some(r.hbar),
            eta: Some(b.eta),
            omega_c: Some(b.omega_c),
            beta: Some(b.beta),
            phi_prime: Some(b.phi_prime),
            kicks: Some(run.kicks),
            p_center: Some(run.p_center),
            q_center: Some(run.q_center),
            l_max: Some(n.l_max),
            nq: Some(n.nq),
            np_grid: Some(n.np_grid),
            p_extent: Some(n.p_extent),
            band_tol: Some(n.band_tol),
            eig_floor: Some(n.eig_floor),
            product_tol: Some(n.product_tol),
            seed,
        }
    }
}
