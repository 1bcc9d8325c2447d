//! Topological machinery for the multi-solenoid bench: homotopy classes as
//! winding vectors, exact-rational flux assignment with unique decoding,
//! generalized flux phase factors, and representative polyline paths with
//! their classical lengths.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use crate::propagator::PhysParams;
use crate::rng::{split_seed, DetRng};
use crate::Complex;

/// Hard cap on (2 n_cutoff + 1)^N_S style enumerations.
pub const ENUM_LIMIT: u64 = 1_000_000;

/// Segments must keep this fraction of the solenoid spacing clear of every
/// solenoid to count as passing through a gap.
const CLEARANCE_FACTOR: f64 = 0.35;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WindingsError {
    #[error("invalid argument: {0}")]
    Invalid(&'static str),
    #[error("enumeration limit exceeded: {0} classes requested, cap is {1}")]
    LimitExceeded(u64, u64),
    #[error("no integer solution within the winding cutoff")]
    NoSolution,
    #[error("decoding is not unique: at least two winding vectors match")]
    NotUnique(WindingVector, WindingVector),
    #[error("could not certify a unique-decoding flux assignment after {0} attempts")]
    CertificationFailed(usize),
    #[error("no gap-midpoint route between the endpoints")]
    Unreachable,
}

/// Integer winding numbers, one per solenoid, labeling a homotopy class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindingVector(pub Vec<i32>);

impl WindingVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }

    pub fn l1(&self) -> u32 {
        self.0.iter().map(|v| v.unsigned_abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }
}

/// Regular array of flux lines in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SolenoidArray {
    positions: Vec<[f64; 2]>,
    spacing_dx: f64,
}

impl SolenoidArray {
    /// Positions must be pairwise distinct; for two or more solenoids the
    /// minimum pairwise distance must equal `spacing_dx`.
    pub fn new(positions: Vec<[f64; 2]>, spacing_dx: f64) -> Result<Self, WindingsError> {
        if positions.is_empty() {
            return Err(WindingsError::Invalid("array needs at least one solenoid"));
        }
        if !(spacing_dx > 0.0) || !spacing_dx.is_finite() {
            return Err(WindingsError::Invalid("spacing must be positive"));
        }
        if positions.len() > 1 {
            let mut min = f64::INFINITY;
            for i in 0..positions.len() {
                for j in (i + 1)..positions.len() {
                    min = min.min(dist(positions[i], positions[j]));
                }
            }
            if min == 0.0 {
                return Err(WindingsError::Invalid("solenoid positions must be distinct"));
            }
            if ((min - spacing_dx) / spacing_dx).abs() > 1e-9 {
                return Err(WindingsError::Invalid(
                    "minimum pairwise distance must equal the spacing",
                ));
            }
        }
        Ok(Self { positions, spacing_dx })
    }

    /// nx columns by ny rows centered on the origin, then shifted up by
    /// `y_offset`.
    pub fn grid(nx: usize, ny: usize, dx: f64, y_offset: f64) -> Result<Self, WindingsError> {
        if nx == 0 || ny == 0 {
            return Err(WindingsError::Invalid("grid dimensions must be positive"));
        }
        let mut positions = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                positions.push([
                    (i as f64 - 0.5 * (nx as f64 - 1.0)) * dx,
                    (j as f64 - 0.5 * (ny as f64 - 1.0)) * dx + y_offset,
                ]);
            }
        }
        Self::new(positions, dx)
    }

    pub fn count(&self) -> usize {
        self.positions.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing_dx
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }
}

/// Exact rational flux per solenoid plus the winding cutoff under which
/// decoding is certified unique.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxAssignment {
    fluxes: Vec<BigRational>,
    n_cutoff: u32,
}

impl FluxAssignment {
    pub fn new(fluxes: Vec<BigRational>, n_cutoff: u32) -> Result<Self, WindingsError> {
        if fluxes.is_empty() {
            return Err(WindingsError::Invalid("need at least one flux"));
        }
        if n_cutoff == 0 {
            return Err(WindingsError::Invalid("winding cutoff must be >= 1"));
        }
        if fluxes.iter().any(|f| !f.is_positive()) {
            return Err(WindingsError::Invalid("fluxes must be positive"));
        }
        Ok(Self { fluxes, n_cutoff })
    }

    pub fn fluxes(&self) -> &[BigRational] {
        &self.fluxes
    }

    pub fn n_cutoff(&self) -> u32 {
        self.n_cutoff
    }

    /// Half-width of the decoder's search box: one step past the
    /// detectability cutoff, so a signal right at the edge still decodes.
    pub fn decode_span(&self) -> u32 {
        self.n_cutoff + 1
    }

    pub fn total_flux(&self) -> BigRational {
        self.fluxes.iter().fold(BigRational::zero(), |a, b| a + b)
    }

    /// Exact sum n . phi for a winding vector.
    pub fn weighted_sum(&self, w: &WindingVector) -> Result<BigRational, WindingsError> {
        if w.0.len() != self.fluxes.len() {
            return Err(WindingsError::Invalid("winding vector length mismatch"));
        }
        let mut acc = BigRational::zero();
        for (n, phi) in w.0.iter().zip(&self.fluxes) {
            acc += phi * BigRational::from_integer(BigInt::from(*n));
        }
        Ok(acc)
    }

    /// Verify that every winding vector the decoder may return maps to a
    /// distinct total flux, i.e. no nonzero difference vector over the
    /// decode box annihilates the fluxes.
    pub fn verify_uniqueness(&self) -> Result<(), WindingsError> {
        let n = self.fluxes.len();
        let span = 2 * self.decode_span();
        check_enum_size(n, 2 * span as u64 + 1)?;
        let mut d = vec![-(span as i32); n];
        loop {
            // skip d = 0 and one of each +/- pair (first nonzero component > 0)
            if let Some(first) = d.iter().find(|&&v| v != 0) {
                if *first > 0 {
                    let wv = WindingVector(d.clone());
                    if self.weighted_sum(&wv)?.is_zero() {
                        // d = a - b with both a and b inside the cutoff box,
                        // so those two vectors decode to the same total flux
                        let a: Vec<i32> = d.iter().map(|v| v / 2).collect();
                        let b: Vec<i32> = d.iter().zip(&a).map(|(v, ai)| ai - v).collect();
                        return Err(WindingsError::NotUnique(WindingVector(a), WindingVector(b)));
                    }
                }
            }
            if !odometer(&mut d, span as i32) {
                return Ok(());
            }
        }
    }
}

fn check_enum_size(dims: usize, base: u64) -> Result<(), WindingsError> {
    let mut total: u64 = 1;
    for _ in 0..dims {
        total = total.saturating_mul(base);
    }
    if total > ENUM_LIMIT {
        return Err(WindingsError::LimitExceeded(total, ENUM_LIMIT));
    }
    Ok(())
}

/// Advance a mixed-radix counter over [-span, span]^n in lexicographic
/// order; returns false after the last vector.
fn odometer(d: &mut [i32], span: i32) -> bool {
    for slot in d.iter_mut().rev() {
        if *slot < span {
            *slot += 1;
            return true;
        }
        *slot = -span;
    }
    false
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Deterministically draw fluxes p_i/q_i with pairwise distinct prime
/// denominators q_i > 10 n_cutoff and p_i coprime to q_i, then certify that
/// decoding within the cutoff box is unique.
pub fn assign_fluxes(n_s: usize, n_cutoff: u32, seed: u64) -> Result<FluxAssignment, WindingsError> {
    if n_s == 0 {
        return Err(WindingsError::Invalid("need at least one solenoid"));
    }
    if n_cutoff == 0 {
        return Err(WindingsError::Invalid("winding cutoff must be >= 1"));
    }
    let floor = 10 * n_cutoff as u64;
    // enough primes above the floor to give the draw room
    let mut primes = Vec::new();
    let mut candidate = floor + 1;
    while primes.len() < n_s * 4 + 8 {
        if is_prime(candidate) {
            primes.push(candidate);
        }
        candidate += 1;
    }

    const ATTEMPTS: usize = 16;
    for attempt in 0..ATTEMPTS {
        let mut rng = DetRng::seed_from(split_seed(seed, attempt as u64));
        let mut chosen = Vec::with_capacity(n_s);
        let mut pool = primes.clone();
        for _ in 0..n_s {
            let idx = rng.below(pool.len() as u64) as usize;
            chosen.push(pool.swap_remove(idx));
        }
        let mut fluxes = Vec::with_capacity(n_s);
        for &q in &chosen {
            let p = loop {
                let cand = 1 + rng.below(3 * q - 1);
                if gcd(cand, q) == 1 {
                    break cand;
                }
            };
            fluxes.push(BigRational::new(BigInt::from(p), BigInt::from(q)));
        }
        let fa = FluxAssignment::new(fluxes, n_cutoff)?;
        if fa.verify_uniqueness().is_ok() {
            return Ok(fa);
        }
    }
    Err(WindingsError::CertificationFailed(ATTEMPTS))
}

/// Exhaustive exact-arithmetic search for the winding vector solving
/// sum_i n_i phi_i = R. The search box extends one step past the cutoff
/// (|n_i| <= n_cutoff + 1) so totals sitting right at the detectability
/// edge still decode; [`FluxAssignment::verify_uniqueness`] certifies the
/// same box.
pub fn decode_total_flux(r: &BigRational, fa: &FluxAssignment) -> Result<WindingVector, WindingsError> {
    let n = fa.fluxes.len();
    check_enum_size(n, 2 * fa.decode_span() as u64 + 1)?;
    let span = fa.decode_span() as i32;
    let mut d = vec![-span; n];
    let mut found: Option<WindingVector> = None;
    loop {
        let wv = WindingVector(d.clone());
        if fa.weighted_sum(&wv)? == *r {
            match found.take() {
                None => found = Some(wv),
                Some(first) => return Err(WindingsError::NotUnique(first, wv)),
            }
        }
        if !odometer(&mut d, span) {
            break;
        }
    }
    found.ok_or(WindingsError::NoSolution)
}

/// Generalized flux phase factor
/// exp[i q/(2 pi hbar c) ((theta'-theta) phi_tot + 2 pi sum_i n_i phi_i)].
pub fn generalized_ab_phase(
    w: &WindingVector,
    fa: &FluxAssignment,
    p: &PhysParams,
    dtheta: f64,
) -> Result<Complex, WindingsError> {
    let s = fa.weighted_sum(w)?;
    let phi_tot = fa.total_flux().to_f64().ok_or(WindingsError::Invalid("flux overflow"))?;
    let s_f = s.to_f64().ok_or(WindingsError::Invalid("flux overflow"))?;
    let arg = p.coupling() * (dtheta * phi_tot + core::f64::consts::TAU * s_f);
    Ok(Complex::from_polar(1.0, arg))
}

/// All winding vectors with |n_i| <= n_cutoff in lexicographic order;
/// (2 n_cutoff + 1)^N_S of them.
pub fn enumerate_classes(n_s: usize, n_cutoff: u32) -> Result<Vec<WindingVector>, WindingsError> {
    if n_s == 0 {
        return Err(WindingsError::Invalid("need at least one solenoid"));
    }
    check_enum_size(n_s, 2 * n_cutoff as u64 + 1)?;
    let span = n_cutoff as i32;
    let mut d = vec![-span; n_s];
    let mut out = Vec::new();
    loop {
        out.push(WindingVector(d.clone()));
        if !odometer(&mut d, span) {
            break;
        }
    }
    Ok(out)
}

/// Polyline realization of a homotopy class and its classical length.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativePath {
    pub polyline: Vec<[f64; 2]>,
    pub winding: WindingVector,
    pub classical_length: f64,
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn seg_point_dist(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(a, p);
    }
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    dist([a[0] + t * ab[0], a[1] + t * ab[1]], p)
}

fn project_on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> ([f64; 2], f64) {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (q, dist(q, p))
}

/// Representative path for a winding vector: the shortest gap-midpoint
/// polyline from `x_in` to `x_fi`, with |n_i| copies of the minimal diamond
/// loop spliced in around each solenoid i with n_i != 0.
pub fn representative_path(
    w: &WindingVector,
    arr: &SolenoidArray,
    x_in: [f64; 2],
    x_fi: [f64; 2],
) -> Result<RepresentativePath, WindingsError> {
    if w.0.len() != arr.count() {
        return Err(WindingsError::Invalid("winding vector length mismatch"));
    }
    let base = base_route(arr, x_in, x_fi)?;

    // splice loops in ascending solenoid order at the nearest point of the
    // base route (inserted as a vertex if it falls inside a segment)
    let mut poly = base;
    for (i, &n_i) in w.0.iter().enumerate() {
        if n_i == 0 {
            continue;
        }
        let center = arr.positions[i];
        let half = 0.5 * arr.spacing_dx;
        // diamond through the four axial gap midpoints, counterclockwise
        let corners = [
            [center[0] + half, center[1]],
            [center[0], center[1] + half],
            [center[0] - half, center[1]],
            [center[0], center[1] - half],
        ];

        // nearest point on the current polyline
        let mut best_seg = 0usize;
        let mut best_pt = poly[0];
        let mut best_d = f64::INFINITY;
        for s in 0..poly.len() - 1 {
            let (q, d) = project_on_segment(poly[s], poly[s + 1], center);
            if d < best_d - 1e-12 {
                best_d = d;
                best_seg = s;
                best_pt = q;
            }
        }
        // entry corner: diamond corner nearest the attach point
        let mut entry = 0usize;
        let mut entry_d = f64::INFINITY;
        for (k, c) in corners.iter().enumerate() {
            let d = dist(*c, best_pt);
            if d < entry_d - 1e-12 {
                entry_d = d;
                entry = k;
            }
        }

        // splice: attach -> entry -> loop corners -> entry -> attach, so each
        // loop contributes its perimeter plus twice the detour distance
        let eps = 1e-12 * (1.0 + arr.spacing_dx);
        let (at, mut insert): (usize, Vec<[f64; 2]>) = if dist(best_pt, poly[best_seg]) < eps {
            (best_seg + 1, Vec::new())
        } else if dist(best_pt, poly[best_seg + 1]) < eps {
            (best_seg + 2, Vec::new())
        } else {
            (best_seg + 1, vec![best_pt])
        };
        let loops = n_i.unsigned_abs() as usize;
        for _ in 0..loops {
            for step in 0..4 {
                // orientation by winding sign; length is sign-independent
                let idx = if n_i > 0 { (entry + step) % 4 } else { (entry + 4 - step) % 4 };
                insert.push(corners[idx]);
            }
        }
        insert.push(corners[entry]);
        insert.push(best_pt);
        for (k, v) in insert.into_iter().enumerate() {
            poly.insert(at + k, v);
        }
    }

    dedup_consecutive(&mut poly);
    let classical_length = poly.windows(2).map(|s| dist(s[0], s[1])).sum();
    Ok(RepresentativePath { polyline: poly, winding: w.clone(), classical_length })
}

fn dedup_consecutive(poly: &mut Vec<[f64; 2]>) {
    let mut i = 1;
    while i < poly.len() {
        if dist(poly[i - 1], poly[i]) < 1e-14 {
            poly.remove(i);
        } else {
            i += 1;
        }
    }
}

/// Shortest polyline from `x_in` to `x_fi` whose interior vertices are gap
/// midpoints and whose segments keep clear of every solenoid. Ties break
/// toward the lexicographically smallest vertex sequence.
fn base_route(arr: &SolenoidArray, x_in: [f64; 2], x_fi: [f64; 2]) -> Result<Vec<[f64; 2]>, WindingsError> {
    let guard = CLEARANCE_FACTOR * arr.spacing_dx;
    let clear = |a: [f64; 2], b: [f64; 2]| -> bool {
        arr.positions.iter().all(|&p| seg_point_dist(a, b, p) > guard)
    };

    // nodes: 0 = x_in, 1 = x_fi, 2.. = gap midpoints
    let mut nodes = vec![x_in, x_fi];
    for i in 0..arr.positions.len() {
        for j in (i + 1)..arr.positions.len() {
            let d = dist(arr.positions[i], arr.positions[j]);
            if ((d - arr.spacing_dx) / arr.spacing_dx).abs() < 1e-9 {
                nodes.push([
                    0.5 * (arr.positions[i][0] + arr.positions[j][0]),
                    0.5 * (arr.positions[i][1] + arr.positions[j][1]),
                ]);
            }
        }
    }

    let n = nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let push_edge = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    if clear(x_in, x_fi) {
        push_edge(&mut adj, 0, 1);
    }
    for k in 2..n {
        if clear(x_in, nodes[k]) {
            push_edge(&mut adj, 0, k);
        }
        if clear(x_fi, nodes[k]) {
            push_edge(&mut adj, 1, k);
        }
        for l in (k + 1)..n {
            if dist(nodes[k], nodes[l]) <= 1.5 * arr.spacing_dx && clear(nodes[k], nodes[l]) {
                push_edge(&mut adj, k, l);
            }
        }
    }

    // Dijkstra with lexicographic tie-break on the vertex sequence
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; n];
    best[0] = Some((0.0, vec![0]));
    let mut done = vec![false; n];
    loop {
        let mut cur: Option<usize> = None;
        for v in 0..n {
            if done[v] || best[v].is_none() {
                continue;
            }
            cur = match cur {
                None => Some(v),
                Some(c) => {
                    let (dc, _) = best[c].as_ref().unwrap();
                    let (dv, _) = best[v].as_ref().unwrap();
                    if dv < dc {
                        Some(v)
                    } else {
                        Some(c)
                    }
                }
            };
        }
        let Some(u) = cur else { break };
        done[u] = true;
        if u == 1 {
            break;
        }
        let (du, pu) = best[u].clone().unwrap();
        for &v in &adj[u] {
            if done[v] {
                continue;
            }
            let cand_cost = du + dist(nodes[u], nodes[v]);
            let mut cand_path = pu.clone();
            cand_path.push(v);
            let better = match &best[v] {
                None => true,
                Some((c, p)) => {
                    cand_cost < c - 1e-12 || ((cand_cost - c).abs() <= 1e-12 && cand_path < *p)
                }
            };
            if better {
                best[v] = Some((cand_cost, cand_path));
            }
        }
    }

    let Some((_, path)) = best[1].clone() else {
        return Err(WindingsError::Unreachable);
    };
    Ok(path.into_iter().map(|i| nodes[i]).collect())
}
