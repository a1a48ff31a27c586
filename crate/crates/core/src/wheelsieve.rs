//! Sieving for the last prime `p_t` of a large `k`.
//!
//! Two constraints cut the search for `p_t <= B / k` down to a few
//! residue classes. First, `p_t ≡ k^-1 (mod λ_k)`, because every base order
//! modulo every factor of `k` divides `k p_t - 1`. Second, `p_t` must share
//! the signature of `k`, which fixes its quadratic character against each
//! base. Those characters become residue sets modulo small odd bases (the
//! wheel), which are enumerated one class at a time so memory grows with the
//! sum of the set sizes rather than their product.
//!
//! The 2-adic part of `λ_k` is folded into the wheel: with `c = v2(λ_k)`,
//! the wheel carries a class modulo `2^max(3, c + 1)` that already implies
//! `p_t ≡ k^-1 (mod 2^c)`, and the progression steps by `w * λ_k / 2^c`.

use crate::bigmath::{mod_inverse_u64, mul_mod_u64, small_primes, spsp_base_count, sprp_unchecked};
use crate::error::Result;
use crate::gcdfilter::CandidateK;
use crate::signatures::{allowed_residues, character_plans, BaseVector, CharacterPlan};

/// Allowed residues modulo one wheel modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WheelComponent {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WheelPlan {
    /// `None` for pure λ-sieving.
    pub plan: Option<CharacterPlan>,
    /// Common value of `q mod 4` over the 2-adic residues, when fixed.
    pub q_mod_4: Option<u8>,
    pub two_adic: Option<WheelComponent>,
    /// Odd wheel bases with their residue sets.
    pub odd: Vec<WheelComponent>,
    /// Product of all component moduli.
    pub w: u64,
    /// Sieving modulus; `w * lambda` is the progression step.
    pub lambda: u64,
}

impl WheelPlan {
    pub fn wheel_primes(&self) -> Vec<u64> {
        self.odd.iter().map(|c| c.modulus).collect()
    }

    pub fn step(&self) -> u128 {
        u128::from(self.w) * u128::from(self.lambda)
    }

    /// Number of classes modulo `w`.
    pub fn class_count(&self) -> u64 {
        self.components().map(|c| c.residues.len() as u64).product()
    }

    pub fn components(&self) -> impl Iterator<Item = &WheelComponent> + '_ {
        self.two_adic.iter().chain(self.odd.iter())
    }
}

/// Plain λ-sieving: `p_t ≡ k^-1 (mod λ_k)`, odd.
pub fn lambda_only_plan(k: &CandidateK) -> WheelPlan {
    let two_adic = (k.lambda % 2 == 1).then(|| WheelComponent {
        modulus: 2,
        residues: vec![1],
    });
    WheelPlan {
        plan: None,
        q_mod_4: None,
        w: if two_adic.is_some() { 2 } else { 1 },
        two_adic,
        odd: Vec::new(),
        lambda: k.lambda,
    }
}

/// Wheel plans whose classes together hold every prime `q` that can
/// complete `k` to a strong pseudoprime with `k q <= bound`.
///
/// Odd bases not dividing `λ_k` join the wheel smallest first while
/// `k λ_k w a < bound / headroom`. For `t > 3` only λ-sieving is used.
pub fn build_wheel_plan(
    k: &CandidateK,
    bound: u128,
    nu: &BaseVector,
    headroom: u64,
) -> Result<Vec<WheelPlan>> {
    if k.t > 3 {
        return Ok(vec![lambda_only_plan(k)]);
    }
    let c = k.lambda.trailing_zeros();
    let lambda = k.lambda >> c;
    let modulus2 = 1u64 << (c + 1).max(3);
    let two_c = 1u64 << c;

    let limit = bound / u128::from(headroom.max(1));
    let mut odd_bases = Vec::new();
    let mut w_odd = 1u128;
    for &a in &nu.bases()[1..] {
        if k.lambda.is_multiple_of(a) {
            continue;
        }
        let size = u128::from(k.k)
            .saturating_mul(u128::from(k.lambda))
            .saturating_mul(w_odd * u128::from(a));
        if size >= limit {
            break;
        }
        w_odd *= u128::from(a);
        odd_bases.push(a);
    }

    let mut plans = Vec::new();
    for cp in character_plans(&k.signature, nu)? {
        let class = cp.two_adic_class;
        let residues: Vec<u64> = (1..modulus2)
            .step_by(2)
            .filter(|&r| r % class.modulus == class.residue % class.modulus)
            .filter(|&r| two_character(r) == cp.two_character)
            .filter(|&r| mul_mod_u64(r, k.k, two_c) == 1 % two_c)
            .collect();
        for q4 in [1u8, 3] {
            let rs: Vec<u64> = residues
                .iter()
                .copied()
                .filter(|&r| r % 4 == u64::from(q4))
                .collect();
            if rs.is_empty() {
                continue;
            }
            let mut odd = Vec::with_capacity(odd_bases.len());
            for &a in &odd_bases {
                let eps = cp
                    .per_base
                    .iter()
                    .find(|&&(b, _)| b == a)
                    .map(|&(_, e)| e)
                    .expect("every odd base has a character");
                odd.push(WheelComponent {
                    modulus: a,
                    residues: allowed_residues(a, eps, q4)?,
                });
            }
            plans.push(WheelPlan {
                plan: Some(cp.clone()),
                q_mod_4: Some(q4),
                two_adic: Some(WheelComponent {
                    modulus: modulus2,
                    residues: rs,
                }),
                w: modulus2 * w_odd as u64,
                odd,
                lambda,
            });
        }
    }
    Ok(plans)
}

/// `(2/r)` for odd `r`.
fn two_character(r: u64) -> i8 {
    match r % 8 {
        1 | 7 => 1,
        _ => -1,
    }
}

/// Residues modulo `plan.w` allowed by every component, each exactly once.
///
/// An odometer runs over the per-component residue lists; each list is
/// stored pre-multiplied by its CRT idempotent so a step only touches the
/// digits that change.
pub fn enumerate_wheel_residues(plan: &WheelPlan) -> WheelResidues {
    let w = plan.w;
    let lanes: Vec<Vec<u64>> = plan
        .components()
        .map(|c| {
            let rest = w / c.modulus;
            let inv = mod_inverse_u64(rest % c.modulus, c.modulus).expect("coprime moduli");
            let e = mul_mod_u64(rest, inv, w);
            c.residues.iter().map(|&r| mul_mod_u64(r, e, w)).collect()
        })
        .collect();
    let empty = lanes.iter().any(|l| l.is_empty());
    let digits = vec![0usize; lanes.len()];
    let partial = vec![0u64; lanes.len() + 1];
    let mut it = WheelResidues {
        w,
        lanes,
        digits,
        partial,
        done: empty,
    };
    if !it.done {
        it.refresh(0);
    }
    it
}

pub struct WheelResidues {
    w: u64,
    lanes: Vec<Vec<u64>>,
    digits: Vec<usize>,
    /// `partial[i]` = sum of the contributions of lanes `0..i`, mod `w`.
    partial: Vec<u64>,
    done: bool,
}

impl WheelResidues {
    fn refresh(&mut self, from: usize) {
        for i in from..self.lanes.len() {
            let v = self.partial[i] + self.lanes[i][self.digits[i]];
            self.partial[i + 1] = if v >= self.w { v - self.w } else { v };
        }
    }
}

impl Iterator for WheelResidues {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let out = self.partial[self.lanes.len()] % self.w.max(1);
        // advance the last digit first
        let mut i = self.lanes.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.lanes[i].len() {
                self.refresh(i);
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SieveHit {
    pub p_t: u64,
    pub n: u64,
    pub bases_passed: usize,
}

const PREFILTER_LIMIT: u64 = 1000;
const BLOCK: usize = 1 << 15;

/// Trial-division sieve over the progression `x + j * step`.
struct Progression {
    step: u64,
    /// For each small prime `s`: `step^-1 mod s`, or `None` when `s | step`.
    inv: Vec<(u64, Option<u64>)>,
}

impl Progression {
    fn new(step: u64) -> Self {
        let inv = small_primes()
            .iter()
            .take_while(|&&s| s <= PREFILTER_LIMIT)
            .map(|&s| (s, mod_inverse_u64(step % s, s)))
            .collect();
        Progression { step, inv }
    }

    /// Probable primes `q` in the class with `lo <= q <= hi`, tested against
    /// `k`; hits with at least one passed base are returned.
    fn run(&self, k: u64, x: u64, lo: u64, hi: u64, m: usize, out: &mut Vec<SieveHit>) {
        if lo > hi {
            return;
        }
        let step = self.step;
        let x = x % step;
        let q0 = match lo.checked_add((x + step - lo % step) % step) {
            Some(q) if q <= hi => q,
            _ => return,
        };
        let count = (hi - q0) / step + 1;
        // a residue sharing a factor with the step holds at most one prime
        let mut fixed = Vec::new();
        for &(s, inv) in &self.inv {
            if inv.is_none() && x.is_multiple_of(s) {
                fixed.push(s);
            }
        }
        if !fixed.is_empty() {
            for &s in &fixed {
                if s >= q0 && (s - q0) % step == 0 && s <= hi {
                    test(k, s, m, out);
                }
            }
            return;
        }
        let mut mark = vec![false; BLOCK];
        let mut base = 0u64;
        while base < count {
            let len = (count - base).min(BLOCK as u64) as usize;
            mark[..len].fill(false);
            let qb = q0 + base * step;
            for &(s, inv) in &self.inv {
                let Some(inv) = inv else { continue };
                // j with qb + j step ≡ 0 (mod s)
                let mut j = ((s - qb % s) % s * inv % s) as usize;
                if qb <= s && u128::from(qb) + j as u128 * u128::from(step) == u128::from(s) {
                    j += s as usize;
                }
                while j < len {
                    mark[j] = true;
                    j += s as usize;
                }
            }
            for (j, &m_) in mark[..len].iter().enumerate() {
                if !m_ {
                    test(k, qb + j as u64 * step, m, out);
                }
            }
            base += len as u64;
        }
    }
}

#[inline]
fn test(k: u64, q: u64, m: usize, out: &mut Vec<SieveHit>) {
    if q < 3 || !sprp_unchecked(&q, &2) {
        return;
    }
    let n = k * q;
    let passed = spsp_base_count(&n, m).unwrap_or(0);
    if passed > 0 {
        out.push(SieveHit {
            p_t: q,
            n,
            bases_passed: passed,
        });
    }
}

/// Sieves one class `x mod step` over `[lo, hi]`.
pub fn sieve_class(k: &CandidateK, x: u64, step: u64, lo: u64, hi: u64, m: usize) -> Vec<SieveHit> {
    let mut out = Vec::new();
    if step == 0 {
        return out;
    }
    Progression::new(step).run(k.k, x, lo, hi, m, &mut out);
    out
}

/// Sieves every class of `plan` over `[lo, hi]`.
pub fn sieve_plan(k: &CandidateK, plan: &WheelPlan, lo: u64, hi: u64, m: usize) -> Vec<SieveHit> {
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    let Some(x0) = mod_inverse_u64(k.k % plan.lambda.max(1), plan.lambda.max(1)) else {
        log::debug!("k = {} is not invertible modulo λ = {}", k.k, plan.lambda);
        return out;
    };
    let Ok(step) = u64::try_from(plan.step()) else {
        return out;
    };
    if step > hi {
        // at most one term per class: test directly
        for r in enumerate_wheel_residues(plan) {
            let x = crt(x0, plan.lambda, r, plan.w);
            if let Some(q) = first_at_least(x, step, lo) {
                if q <= hi {
                    test(k.k, q, m, &mut out);
                }
            }
        }
        return out;
    }
    let prog = Progression::new(step);
    for r in enumerate_wheel_residues(plan) {
        let x = crt(x0, plan.lambda, r, plan.w);
        prog.run(k.k, x, lo, hi, m, &mut out);
    }
    out
}

fn first_at_least(x: u64, step: u64, lo: u64) -> Option<u64> {
    let x = x % step;
    if x >= lo {
        return Some(x);
    }
    lo.checked_add((x + step - lo % step) % step)
}

/// The class modulo `l * w` that is `a mod l` and `r mod w` (coprime moduli).
fn crt(a: u64, l: u64, r: u64, w: u64) -> u64 {
    if w == 1 {
        return a % l.max(1);
    }
    let inv = mod_inverse_u64(l % w, w).expect("coprime moduli");
    let diff = (r % w + w - a % w) % w;
    let t = mul_mod_u64(diff, inv, w);
    (u128::from(a) + u128::from(l) * u128::from(t)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::is_prime_u64;
    use crate::primestream::{lambda_p, stream_primes};
    use crate::signatures::{compute_signature, Scenario};

    fn cand(p: u64, m: usize) -> CandidateK {
        let nu = BaseVector::first(m).unwrap();
        let rec = stream_primes(p, p, 1).unwrap().next().unwrap();
        let s = compute_signature(&p, &rec.p_minus_1, &nu).unwrap();
        CandidateK::new(&[(p, lambda_p(&rec, &nu).unwrap())], s).unwrap()
    }

    fn plan_from(sets: &[(u64, &[u64])]) -> WheelPlan {
        let odd: Vec<WheelComponent> = sets
            .iter()
            .map(|&(m, r)| WheelComponent {
                modulus: m,
                residues: r.to_vec(),
            })
            .collect();
        WheelPlan {
            plan: None,
            q_mod_4: None,
            two_adic: None,
            w: odd.iter().map(|c| c.modulus).product(),
            odd,
            lambda: 1,
        }
    }

    #[test]
    fn odometer_examples() {
        let p = plan_from(&[(5, &[2, 3]), (13, &[2, 5, 6, 7, 8, 11])]);
        let mut v: Vec<u64> = enumerate_wheel_residues(&p).collect();
        assert_eq!(v.len(), 12);
        v.sort_unstable();
        let mut want: Vec<u64> = (0..65)
            .filter(|r| [2, 3].contains(&(r % 5)) && [2, 5, 6, 7, 8, 11].contains(&(r % 13)))
            .collect();
        want.sort_unstable();
        assert_eq!(v, want);
        let p = plan_from(&[(3, &[2])]);
        assert_eq!(enumerate_wheel_residues(&p).collect::<Vec<_>>(), [2]);
        let p = plan_from(&[]);
        assert_eq!(enumerate_wheel_residues(&p).collect::<Vec<_>>(), [0]);
        let p = plan_from(&[(3, &[])]);
        assert_eq!(enumerate_wheel_residues(&p).count(), 0);
    }

    #[test]
    fn golden_wheel() {
        let k = cand(300_000_317, 6);
        let nu = BaseVector::first(6).unwrap();
        assert_eq!(k.lambda, 300_000_316);
        let plans = build_wheel_plan(&k, 4_000_000_000_000_000_000_000_000, &nu, 1000).unwrap();
        let eq: Vec<&WheelPlan> = plans
            .iter()
            .filter(|p| p.plan.as_ref().unwrap().scenario == Scenario::EqualValuation)
            .collect();
        assert_eq!(eq.len(), 1);
        let eq = eq[0];
        assert_eq!(eq.wheel_primes(), [3, 5, 13]);
        assert_eq!(eq.odd[0].residues, [2]);
        assert_eq!(eq.odd[1].residues, [2, 3]);
        assert_eq!(eq.odd[2].residues, [2, 5, 6, 7, 8, 11]);
        assert_eq!(eq.two_adic.as_ref().unwrap().residues, [5]);
        assert_eq!(eq.class_count(), 12);
        assert_eq!(eq.lambda, 300_000_316 / 4);
    }

    #[test]
    fn tight_headroom_degenerates() {
        let k = cand(300_000_317, 6);
        let nu = BaseVector::first(6).unwrap();
        let plans = build_wheel_plan(&k, 1 << 60, &nu, 1000).unwrap();
        assert!(plans.iter().all(|p| p.odd.is_empty()));
        let lp = lambda_only_plan(&k);
        assert_eq!((lp.w, lp.lambda), (1, 300_000_316));
    }

    #[test]
    fn sieve_finds_2047_and_psi2() {
        let k = cand(23, 1);
        assert_eq!(k.lambda, 11);
        let hits = sieve_class(&k, 1, 11, 24, 89, 1);
        assert!(hits.iter().any(|h| h.n == 2047 && h.p_t == 89));
        assert!(sieve_class(&k, 1, 11, 90, 89, 1).is_empty());

        let k = cand(829, 2);
        let nu = BaseVector::first(2).unwrap();
        let bound = 1_400_000u64;
        let hits: Vec<SieveHit> = build_wheel_plan(&k, u128::from(bound), &nu, 1)
            .unwrap()
            .iter()
            .flat_map(|p| sieve_plan(&k, p, 830, bound / 829, 2))
            .collect();
        assert!(hits.iter().any(|h| h.n == 1373653 && h.bases_passed == 2));
    }

    #[test]
    fn emitted_primes_follow_the_class() {
        let k = cand(1_000_003, 4);
        let nu = BaseVector::first(4).unwrap();
        let bound = 1u64 << 50;
        for plan in build_wheel_plan(&k, u128::from(bound), &nu, 10).unwrap() {
            for h in sieve_plan(&k, &plan, 1_000_004, bound / k.k, 4) {
                assert_eq!(mul_mod_u64(h.p_t, k.k, k.lambda), 1 % k.lambda);
                assert!(is_prime_u64(h.p_t) || h.bases_passed >= 1);
            }
        }
    }

    #[test]
    fn crt_combines() {
        let x = crt(3, 7, 5, 8);
        assert_eq!((x % 7, x % 8), (3, 5));
        assert_eq!(crt(4, 9, 0, 1), 4);
    }
}
