//! Network scenario: topology, virtualization structure, physical constants
//! and random channel generation.
//!
//! A scenario has `I` infrastructure providers (InPs), each owning `B` base
//! stations (index 0 is the macro BS, the rest are femto BSs) and `N`
//! subcarriers on a band disjoint from every other InP. The `K` users are
//! partitioned among `V` MVNOs. All transmitters carry `M_T` antennas,
//! receivers a single one.
//!
//! Channel vectors follow a flat pathloss-plus-Rayleigh-like model: each
//! coefficient has an exponentially distributed small-scale power gain with
//! configurable mean, a uniform phase, and a `d^(-pathloss_exp/2)` amplitude
//! scaling. Generation is a pure function of `(scenario, seed)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ConfigError;
use crate::index::EntryIndex;
use crate::math::{dbm_to_watt, F64Ext, TWO_PI};

/// BS–user distances are clamped below this to avoid the pathloss
/// singularity at zero range.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Planar coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    #[inline]
    pub fn distance(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt_()
    }
}

/// Scenario parameters as read from a config file.
///
/// `users_per_mvno` partitions the user indices in order: the first
/// `users_per_mvno[0]` users belong to MVNO 0 and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub inps: usize,
    pub mvnos: usize,
    pub bs_per_inp: usize,
    pub subcarriers: usize,
    pub subcarrier_bw_hz: f64,
    pub users: usize,
    pub users_per_mvno: Vec<usize>,
    pub antennas: usize,
    pub noma_cap: usize,
    pub p_max_mbs_w: f64,
    pub p_max_fbs_w: f64,
    pub p_max_mvno_w: f64,
    pub r_min_bps_hz: Vec<f64>,
    pub noise_psd_dbm_hz: f64,
    pub radius_m: f64,
    pub pathloss_exp: f64,
    pub channel_mean: f64,
}

impl ScenarioConfig {
    /// The reference simulation setup: two InPs with one macro and five femto
    /// BSs each, 32 subcarriers of 312.5 kHz, 20 users split over two MVNOs
    /// with (2, 3) bps/Hz rate floors, 5 antennas, NOMA cap 2, and
    /// (5, 0.5, 4) W power budgets for MBS/FBS/MVNO.
    pub fn reference() -> Self {
        Self {
            inps: 2,
            mvnos: 2,
            bs_per_inp: 6,
            subcarriers: 32,
            subcarrier_bw_hz: 312_500.0,
            users: 20,
            users_per_mvno: vec![10, 10],
            antennas: 5,
            noma_cap: 2,
            p_max_mbs_w: 5.0,
            p_max_fbs_w: 0.5,
            p_max_mvno_w: 4.0,
            r_min_bps_hz: vec![2.0, 3.0],
            noise_psd_dbm_hz: -174.0,
            radius_m: 1000.0,
            pathloss_exp: 2.0,
            channel_mean: 0.2,
        }
    }

    /// A small profile the global solver can handle: one InP, two BSs, two
    /// subcarriers, three users, one antenna, no rate floor.
    pub fn tiny() -> Self {
        Self {
            inps: 1,
            mvnos: 1,
            bs_per_inp: 2,
            subcarriers: 2,
            subcarrier_bw_hz: 312_500.0,
            users: 3,
            users_per_mvno: vec![3],
            antennas: 1,
            noma_cap: 2,
            p_max_mbs_w: 5.0,
            p_max_fbs_w: 0.5,
            p_max_mvno_w: 10.0,
            r_min_bps_hz: vec![0.0],
            noise_psd_dbm_hz: -174.0,
            radius_m: 100.0,
            pathloss_exp: 2.0,
            channel_mean: 0.2,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        fn positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(field, "must be strictly positive"))
            }
        }
        fn at_least_one(field: &'static str, v: usize) -> Result<(), ConfigError> {
            if v >= 1 {
                Ok(())
            } else {
                Err(ConfigError::new(field, "must be at least 1"))
            }
        }
        at_least_one("inps", self.inps)?;
        at_least_one("mvnos", self.mvnos)?;
        at_least_one("bs_per_inp", self.bs_per_inp)?;
        at_least_one("subcarriers", self.subcarriers)?;
        at_least_one("antennas", self.antennas)?;
        at_least_one("noma_cap", self.noma_cap)?;
        positive("subcarrier_bw_hz", self.subcarrier_bw_hz)?;
        positive("p_max_mbs_w", self.p_max_mbs_w)?;
        positive("p_max_fbs_w", self.p_max_fbs_w)?;
        positive("p_max_mvno_w", self.p_max_mvno_w)?;
        positive("radius_m", self.radius_m)?;
        positive("channel_mean", self.channel_mean)?;
        if !self.pathloss_exp.is_finite() || self.pathloss_exp < 0.0 {
            return Err(ConfigError::new("pathloss_exp", "must be nonnegative"));
        }
        if !self.noise_psd_dbm_hz.is_finite() {
            return Err(ConfigError::new("noise_psd_dbm_hz", "must be finite"));
        }
        if self.users_per_mvno.len() != self.mvnos {
            return Err(ConfigError::new(
                "users_per_mvno",
                "must list one count per MVNO",
            ));
        }
        if self.users_per_mvno.iter().sum::<usize>() != self.users {
            return Err(ConfigError::new(
                "users_per_mvno",
                "counts must sum to `users`",
            ));
        }
        if self.r_min_bps_hz.len() != self.mvnos {
            return Err(ConfigError::new(
                "r_min_bps_hz",
                "must list one rate per MVNO",
            ));
        }
        for (v, r) in self.r_min_bps_hz.iter().enumerate() {
            if !r.is_finite() || *r < 0.0 {
                return Err(ConfigError::new(
                    "r_min_bps_hz",
                    alloc::format!("rate for MVNO {v} must be nonnegative"),
                ));
            }
        }
        Ok(())
    }
}

/// Static topology, resource budgets, MVNO slicing and physical constants.
///
/// Immutable after construction; safe to share across concurrent workers.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    pub num_inps: usize,
    pub num_mvnos: usize,
    pub bs_per_inp: usize,
    pub subcarriers_per_inp: usize,
    pub subcarrier_bandwidth: f64,
    pub num_users: usize,
    /// MVNO owning each user.
    pub mvno_of_user: Vec<usize>,
    pub antennas: usize,
    /// Per-(BS, subcarrier) NOMA multiplexing cap `L_T`.
    pub noma_cap: usize,
    /// Transmit power budget per BS, flat over `(i, b)`.
    pub p_max_bs: Vec<f64>,
    /// Transmit power budget per MVNO.
    pub p_max_mvno: Vec<f64>,
    /// Minimum per-user rate guarantee per MVNO, bps/Hz.
    pub r_min_mvno: Vec<f64>,
    pub noise_psd_dbm_hz: f64,
    /// Noise power per subcarrier in watts, derived from the PSD and the
    /// subcarrier bandwidth.
    pub noise_power: f64,
    pub cell_radius: f64,
    pub pathloss_exponent: f64,
    pub channel_mean: f64,
    /// BS positions, flat over `(i, b)`.
    pub bs_positions: Vec<Position>,
    pub user_positions: Vec<Position>,
    pub seed: u64,
}

impl NetworkScenario {
    /// Index helper for all per-entry storage of this scenario.
    #[inline]
    pub fn idx(&self) -> EntryIndex {
        EntryIndex {
            inps: self.num_inps,
            bs_per_inp: self.bs_per_inp,
            subcarriers: self.subcarriers_per_inp,
            users: self.num_users,
            antennas: self.antennas,
        }
    }

    /// Users belonging to MVNO `v`, in ascending index order.
    pub fn users_of_mvno(&self, v: usize) -> Vec<usize> {
        (0..self.num_users)
            .filter(|&k| self.mvno_of_user[k] == v)
            .collect()
    }

    /// Rate floor that applies to user `k`.
    #[inline]
    pub fn r_min_of_user(&self, k: usize) -> f64 {
        self.r_min_mvno[self.mvno_of_user[k]]
    }

    /// Power budget of BS `(i, b)`.
    #[inline]
    pub fn p_max_of_bs(&self, i: usize, b: usize) -> f64 {
        self.p_max_bs[i * self.bs_per_inp + b]
    }

    /// BS–user distance with the minimum-range clamp applied.
    pub fn distance(&self, i: usize, b: usize, k: usize) -> f64 {
        let d = self.bs_positions[i * self.bs_per_inp + b].distance(&self.user_positions[k]);
        if d < MIN_DISTANCE_M {
            MIN_DISTANCE_M
        } else {
            d
        }
    }
}

fn draw_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> Position {
    let r = radius * rng.gen::<f64>().sqrt_();
    let phi = TWO_PI * rng.gen::<f64>();
    Position {
        x: r * phi.cos_(),
        y: r * phi.sin_(),
    }
}

/// Build a scenario from a validated config, placing BSs and users uniformly
/// at random in a disc of `radius_m`. Deterministic in `seed`.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<NetworkScenario, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut bs_positions = Vec::with_capacity(config.inps * config.bs_per_inp);
    for _ in 0..config.inps * config.bs_per_inp {
        bs_positions.push(draw_in_disc(&mut rng, config.radius_m));
    }
    let mut user_positions = Vec::with_capacity(config.users);
    for _ in 0..config.users {
        user_positions.push(draw_in_disc(&mut rng, config.radius_m));
    }

    let mut mvno_of_user = Vec::with_capacity(config.users);
    for (v, &count) in config.users_per_mvno.iter().enumerate() {
        for _ in 0..count {
            mvno_of_user.push(v);
        }
    }

    let mut p_max_bs = Vec::with_capacity(config.inps * config.bs_per_inp);
    for _ in 0..config.inps {
        for b in 0..config.bs_per_inp {
            p_max_bs.push(if b == 0 {
                config.p_max_mbs_w
            } else {
                config.p_max_fbs_w
            });
        }
    }

    let noise_power = dbm_to_watt(config.noise_psd_dbm_hz) * config.subcarrier_bw_hz;

    Ok(NetworkScenario {
        num_inps: config.inps,
        num_mvnos: config.mvnos,
        bs_per_inp: config.bs_per_inp,
        subcarriers_per_inp: config.subcarriers,
        subcarrier_bandwidth: config.subcarrier_bw_hz,
        num_users: config.users,
        mvno_of_user,
        antennas: config.antennas,
        noma_cap: config.noma_cap,
        p_max_bs,
        p_max_mvno: vec![config.p_max_mvno_w; config.mvnos],
        r_min_mvno: config.r_min_bps_hz.clone(),
        noise_psd_dbm_hz: config.noise_psd_dbm_hz,
        noise_power,
        cell_radius: config.radius_m,
        pathloss_exponent: config.pathloss_exp,
        channel_mean: config.channel_mean,
        bs_positions,
        user_positions,
        seed,
    })
}

/// Per-(BS, subcarrier, user) complex channel vectors plus the SIC orderings
/// derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    /// Channel coefficients, antenna-major per entry (see [`EntryIndex`]).
    pub h: Vec<Complex64>,
    /// Copies of the BS/user placement the channels were drawn for.
    pub bs_positions: Vec<Position>,
    pub user_positions: Vec<Position>,
    pub seed: u64,
    idx: EntryIndex,
    /// Per-(i, n): users sorted by descending average channel power gain.
    sic_orders: Vec<Vec<usize>>,
    /// Per-(i, n, k): position of `k` in the order above (0 = highest).
    sic_ranks: Vec<usize>,
    /// Average gains backing the ordering, per (i, n, k).
    avg_gains: Vec<f64>,
}

impl ChannelState {
    /// Channel vector of entry `(i, b, n, k)`.
    #[inline]
    pub fn vector(&self, i: usize, b: usize, n: usize, k: usize) -> &[Complex64] {
        let s = self.idx.vec_of(i, b, n, k);
        &self.h[s..s + self.idx.antennas]
    }

    /// `‖h‖²` of entry `(i, b, n, k)`.
    pub fn gain(&self, i: usize, b: usize, n: usize, k: usize) -> f64 {
        self.vector(i, b, n, k).iter().map(|c| c.norm_sqr()).sum()
    }

    /// Average channel power gain of user `k` across the BSs of InP `i` on
    /// subcarrier `n` (the quantity the SIC ordering sorts by).
    #[inline]
    pub fn avg_gain(&self, i: usize, n: usize, k: usize) -> f64 {
        self.avg_gains[self.idx.user_sub_of(i, n, k)]
    }

    /// SIC ordering on `(i, n)`: all users, descending in average gain, ties
    /// broken by ascending user index. Index 0 is the highest-order user.
    #[inline]
    pub fn sic_order(&self, i: usize, n: usize) -> &[usize] {
        &self.sic_orders[self.idx.sub_of(i, n)]
    }

    /// Rank of user `k` in the SIC ordering of `(i, n)`; 0 is highest.
    #[inline]
    pub fn sic_rank(&self, i: usize, n: usize, k: usize) -> usize {
        self.sic_ranks[self.idx.user_sub_of(i, n, k)]
    }

    /// Whether `ka` is of strictly higher SIC order than `kb` on `(i, n)`.
    #[inline]
    pub fn higher_order(&self, i: usize, n: usize, ka: usize, kb: usize) -> bool {
        self.sic_rank(i, n, ka) < self.sic_rank(i, n, kb)
    }

    /// Rebuild a channel state from raw coefficients (test and tooling hook;
    /// `generate_channels` is the production path).
    pub fn from_coefficients(scn: &NetworkScenario, h: Vec<Complex64>, seed: u64) -> Self {
        let idx = scn.idx();
        assert_eq!(h.len(), idx.coeffs(), "coefficient count mismatch");
        let mut state = ChannelState {
            h,
            bs_positions: scn.bs_positions.clone(),
            user_positions: scn.user_positions.clone(),
            seed,
            idx,
            sic_orders: Vec::new(),
            sic_ranks: vec![0; scn.num_inps * scn.subcarriers_per_inp * scn.num_users],
            avg_gains: vec![0.0; scn.num_inps * scn.subcarriers_per_inp * scn.num_users],
        };
        state.derive_orderings(scn);
        state
    }

    fn derive_orderings(&mut self, scn: &NetworkScenario) {
        let idx = self.idx;
        self.sic_orders = Vec::with_capacity(scn.num_inps * scn.subcarriers_per_inp);
        for i in 0..scn.num_inps {
            for n in 0..scn.subcarriers_per_inp {
                for k in 0..scn.num_users {
                    let sum: f64 = (0..scn.bs_per_inp).map(|b| self.gain(i, b, n, k)).sum();
                    self.avg_gains[idx.user_sub_of(i, n, k)] = sum / scn.bs_per_inp as f64;
                }
                let mut order: Vec<usize> = (0..scn.num_users).collect();
                // Descending gain; equal gains fall back to ascending index,
                // which `sort_by` preserves because it is stable.
                order.sort_by(|&a, &b| {
                    let ga = self.avg_gains[idx.user_sub_of(i, n, a)];
                    let gb = self.avg_gains[idx.user_sub_of(i, n, b)];
                    gb.partial_cmp(&ga).unwrap_or(core::cmp::Ordering::Equal)
                });
                for (rank, &k) in order.iter().enumerate() {
                    self.sic_ranks[idx.user_sub_of(i, n, k)] = rank;
                }
                self.sic_orders.push(order);
            }
        }
    }
}

/// Draw channel vectors for every `(i, b, n, k)` entry. Deterministic in
/// `(scenario, seed)`; independent draws per coefficient.
pub fn generate_channels(scn: &NetworkScenario, seed: u64) -> ChannelState {
    let idx = scn.idx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Vec::with_capacity(idx.coeffs());
    for (i, b, _n, k) in idx.iter() {
        let d = scn.distance(i, b, k);
        let amp_scale = d.powf_(-scn.pathloss_exponent / 2.0);
        for _m in 0..scn.antennas {
            let (re, im) = draw_coefficient(&mut rng, scn.channel_mean);
            h.push(Complex64::new(re * amp_scale, im * amp_scale));
        }
    }
    ChannelState::from_coefficients(scn, h, seed)
}

/// One small-scale coefficient at unit distance: exponential power gain of
/// the given mean, uniform phase.
fn draw_coefficient(rng: &mut ChaCha8Rng, mean: f64) -> (f64, f64) {
    let u: f64 = rng.gen();
    let power = -mean * (1.0 - u).ln_();
    let amp = power.sqrt_();
    let phase = TWO_PI * rng.gen::<f64>();
    (amp * phase.cos_(), amp * phase.sin_())
}

/// SIC ordering of users on `(inp, subcarrier)`: a permutation of the whole
/// user set, descending in average channel power gain across the InP's BSs.
pub fn sic_order(channels: &ChannelState, inp: usize, subcarrier: usize) -> Vec<usize> {
    channels.sic_order(inp, subcarrier).to_vec()
}
