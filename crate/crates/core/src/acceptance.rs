//! The acceptance suite: ten criteria, each checked against oracles written
//! here with plain `Option<i64>` arithmetic, independent of the library's
//! matrix code. Used by the `acceptance` test target and `tropid selftest`.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::csr::{minimize_certificate, nested_csr_expansion, singular_power_decomposition, WeakCsr};
use crate::gen::{random_matrix, random_pr_pair, random_word, trial_rng, EntryDist};
use crate::graph::restricted_walk_optimum;
use crate::identities::{
    construct_identity, construction_length, falsify, verify_exact, BaseLibrary, ConstructOptions, ExactVerdict,
    FalsifyConfig, Identity, LengthParams, Monoid, TriangularBase, Variant,
};
use crate::matrix::TropMatrix;
use crate::ranks::{factor_rank_exact, RankCertificate, RankKind};
use crate::scalar::{lcm_upto, TropScalar};
use crate::words::{one_cyclic_optimum, Evaluator, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// The stated trial counts.
    Full,
    /// Roughly a tenth of the work, same criteria.
    Quick,
}

impl Scale {
    fn pick(self, full: u64, quick: u64) -> u64 {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "weak CSR expansion"),
    (2, "factor-rank collapse certificate"),
    (3, "singular power as n-1 rank-one terms"),
    (4, "tropical rank <= factor rank"),
    (5, "restricted walks realize B^t"),
    (6, "diagonal formula and 1-cyclic optimum"),
    (7, "exact verifier milestones"),
    (8, "constructed M2 and M3 identities"),
    (9, "example lengths"),
    (10, "length recursion up to n = 6"),
];

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:>2} {:<40} {:>8.2}s  {}", self.id, self.title, self.seconds, self.detail)
    }
}

type Check = std::result::Result<String, String>;

pub fn run(id: u8, scale: Scale, seed: u64) -> Outcome {
    let (_, title) = CRITERIA.iter().find(|c| c.0 == id).copied().expect("criterion id in 1..=10");
    let seed = seed.wrapping_add(u64::from(id) << 32);
    let start = Instant::now();
    let result = match id {
        1 => weak_csr(scale, seed),
        2 => factor_certificate(scale, seed),
        3 => singular_power(scale, seed),
        4 => rank_inequality(scale, seed),
        5 => restricted_walks(scale, seed),
        6 => pr_consequences(scale, seed),
        7 => exact_milestones(),
        8 => construction_end_to_end(scale, seed),
        9 => example_lengths(scale, seed),
        _ => length_recursion(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome { id, title, passed, detail, seconds }
}

pub fn run_all(scale: Scale, seed: u64) -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run(id, scale, seed)).collect()
}

mod oracle {
    //! Max-plus arithmetic on `Option<i64>` (`None` is bottom).

    use crate::matrix::TropMatrix;
    use crate::scalar::TropScalar;
    use crate::words::{Letter, Word};

    pub type M = Vec<Vec<Option<i64>>>;

    pub fn from(m: &TropMatrix) -> M {
        (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| match m.get(i, j) {
                        TropScalar::Bottom => None,
                        TropScalar::Finite(x) => {
                            assert!(x.is_integer(), "oracle takes integer matrices");
                            Some(*x.numer())
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to(m: &M) -> TropMatrix {
        TropMatrix::from_ints(m).unwrap()
    }

    pub fn mul(x: &M, y: &M) -> M {
        let (n, k, m) = (x.len(), y.len(), y[0].len());
        let mut out = vec![vec![None; m]; n];
        for i in 0..n {
            for j in 0..m {
                for l in 0..k {
                    if let (Some(a), Some(b)) = (x[i][l], y[l][j]) {
                        out[i][j] = Some(out[i][j].map_or(a + b, |c: i64| c.max(a + b)));
                    }
                }
            }
        }
        out
    }

    pub fn join(x: &M, y: &M) -> M {
        x.iter().zip(y).map(|(r, s)| r.iter().zip(s).map(|(&a, &b)| a.max(b)).collect()).collect()
    }

    pub fn outer(c: &[Option<i64>], r: &[Option<i64>]) -> M {
        c.iter().map(|&a| r.iter().map(|&b| Some(a? + b?)).collect()).collect()
    }

    pub fn identity(n: usize) -> M {
        (0..n).map(|i| (0..n).map(|j| (i == j).then_some(0)).collect()).collect()
    }

    /// `x^t` by repeated multiplication.
    pub fn power(x: &M, t: u64) -> M {
        (0..t).fold(identity(x.len()), |acc, _| mul(&acc, x))
    }

    /// Letter-by-letter product.
    pub fn eval(w: &Word, a: &M, b: &M) -> M {
        w.letters().fold(identity(a.len()), |acc, l| mul(&acc, if l == Letter::A { a } else { b }))
    }

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect()).collect()
    }

    /// Finite permanent attained by exactly one permutation.
    pub fn nonsingular(x: &M, rows: &[usize], cols: &[usize]) -> bool {
        let mut best: Option<i64> = None;
        let mut count = 0;
        for p in permutations(rows.len()) {
            let w: Option<i64> = p.iter().enumerate().map(|(r, &c)| x[rows[r]][cols[c]]).sum();
            let Some(w) = w else { continue };
            match best {
                Some(b) if w < b => {}
                Some(b) if w == b => count += 1,
                _ => {
                    best = Some(w);
                    count = 1;
                }
            }
        }
        count == 1
    }

    /// Largest nonsingular square submatrix, by brute force.
    pub fn tropical_rank(x: &M) -> usize {
        let (n, m) = (x.len(), x[0].len());
        for k in (1..=n.min(m)).rev() {
            for rows in subsets(n, k) {
                for cols in subsets(m, k) {
                    if nonsingular(x, &rows, &cols) {
                        return k;
                    }
                }
            }
        }
        0
    }
}

fn word_between<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> Word {
    let len = rng.gen_range(lo..=hi);
    random_word(rng, len)
}

fn dist_for(k: u64, masses: &[f64]) -> EntryDist {
    EntryDist::default().with_bottom_mass(masses[(k % masses.len() as u64) as usize])
}

fn fail(what: impl fmt::Display, a: &TropMatrix) -> String {
    format!("{what} for A = {a}")
}

fn weak_csr(scale: Scale, seed: u64) -> Check {
    let per_n = scale.pick(1000, 100);
    let mut checked = 0u64;
    for n in 2..=6usize {
        let t0 = ((n - 1) * (n - 1) + 1) as u64;
        for k in 0..per_n {
            let a = random_matrix(&mut trial_rng(seed + n as u64, k), n, n, &dist_for(k, &[0.0, 0.3, 0.6]));
            let csr = WeakCsr::new(&a).map_err(|e| fail(e, &a))?;
            let ao = oracle::from(&a);
            let mut expected = oracle::power(&ao, t0);
            for t in t0..t0 + 15 {
                if csr.expansion(t) != oracle::to(&expected) {
                    return Err(fail(format!("A^{t} differs from its expansion"), &a));
                }
                expected = oracle::mul(&expected, &ao);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (matrix, t) pairs, n = 2..6"))
}

fn factor_certificate(scale: Scale, seed: u64) -> Check {
    let per_n = scale.pick(500, 50);
    let mut worst = 0.0f64;
    for n in 2..=5usize {
        let t = ((n - 1) * (n - 1) + 1) as u64;
        for k in 0..per_n {
            let a = random_matrix(&mut trial_rng(seed + n as u64, k), n, n, &dist_for(k, &[0.0, 0.3, 0.6]));
            let cert = nested_csr_expansion(&a, t).and_then(|c| minimize_certificate(&c, &a)).map_err(|e| fail(e, &a))?;
            let ao = oracle::from(&a);
            let target = oracle::power(&ao, t);
            let mut sum = vec![vec![None; n]; n];
            for (c, r) in cert.rank_one_terms() {
                let c: Vec<Option<i64>> = oracle::from(&TropMatrix::from_rows(vec![c]).unwrap())[0].clone();
                let r: Vec<Option<i64>> = oracle::from(&TropMatrix::from_rows(vec![r]).unwrap())[0].clone();
                sum = oracle::join(&sum, &oracle::outer(&c, &r));
            }
            if sum != target || cert.reconstruct(n) != oracle::to(&target) {
                return Err(fail("minimized certificate does not reconstruct A^t", &a));
            }
            let rank = oracle::tropical_rank(&ao);
            if cert.sum_of_lengths > rank {
                return Err(fail(format!("sum of cycle lengths {} exceeds rank {rank}", cert.sum_of_lengths), &a));
            }
            if rank > 0 {
                worst = worst.max(cert.sum_of_lengths as f64 / rank as f64);
            }
        }
    }
    Ok(format!("{} matrices, max (sum of lengths)/rank = {worst:.2}", 4 * per_n))
}

fn singular_power(scale: Scale, seed: u64) -> Check {
    let per_n = scale.pick(300, 30);
    let mut draws = 0u64;
    for n in 2..=3usize {
        let nbar = lcm_upto(n as u64);
        let t = 3 * n as u64 - 2;
        let mut found = 0;
        let mut k = 0u64;
        while found < per_n {
            k += 1;
            if k > 1_000_000 {
                return Err(format!("could not sample {per_n} singular powers for n = {n}"));
            }
            let a = random_matrix(&mut trial_rng(seed + n as u64, k), n, n, &dist_for(k, &[0.0, 0.3, 0.6]));
            let b = oracle::power(&oracle::from(&a), nbar);
            if oracle::tropical_rank(&b) == n {
                continue;
            }
            found += 1;
            let spd = singular_power_decomposition(&a, t).map_err(|e| fail(e, &a))?;
            if spd.terms.len() != n - 1 {
                return Err(fail(format!("{} terms", spd.terms.len()), &a));
            }
            let to_vec = |v: &Vec<TropScalar>| oracle::from(&TropMatrix::from_rows(vec![v.clone()]).unwrap())[0].clone();
            let sum = spd
                .terms
                .iter()
                .fold(vec![vec![None; n]; n], |acc, (c, r)| oracle::join(&acc, &oracle::outer(&to_vec(c), &to_vec(r))));
            if sum != oracle::power(&b, t) {
                return Err(fail("rank-one terms do not reconstruct B^t", &a));
            }
        }
        draws += k;
    }
    Ok(format!("{} singular powers from {draws} draws", 2 * per_n))
}

fn rank_inequality(scale: Scale, seed: u64) -> Check {
    let count = scale.pick(500, 50);
    let mut strict = 0;
    for k in 0..count {
        let a = random_matrix(&mut trial_rng(seed, k), 3, 3, &dist_for(k, &[0.0, 0.3, 0.6]));
        let ao = oracle::from(&a);
        let report = factor_rank_exact(&a, 3).map_err(|e| fail(e, &a))?;
        if report.kind != RankKind::FactorExact {
            return Err(fail(format!("factor rank not exact: {:?}", report.kind), &a));
        }
        match &report.certificate {
            Some(RankCertificate::Factorization { b, c }) => {
                if b.cols() != report.value || oracle::mul(&oracle::from(b), &oracle::from(c)) != ao {
                    return Err(fail("factorization certificate is wrong", &a));
                }
            }
            Some(RankCertificate::EmptyFactorization) if ao.iter().flatten().all(Option::is_none) => {}
            other => return Err(fail(format!("unexpected certificate {other:?}"), &a)),
        }
        let tr = oracle::tropical_rank(&ao);
        if tr > report.value {
            return Err(fail(format!("tropical rank {tr} > factor rank {}", report.value), &a));
        }
        strict += usize::from(tr < report.value);
    }
    Ok(format!("{count} matrices, {strict} with strict inequality"))
}

fn restricted_walks(scale: Scale, seed: u64) -> Check {
    let per_n = scale.pick(300, 30);
    let mut entries = 0u64;
    for n in 2..=4usize {
        for k in 0..per_n {
            let a = random_matrix(&mut trial_rng(seed + n as u64, k), n, n, &dist_for(k, &[0.0, 0.3, 0.6]));
            let b = oracle::power(&oracle::from(&a), lcm_upto(n as u64));
            let bm = oracle::to(&b);
            let lo = 2 * n as u64 - 2;
            let mut bt = oracle::power(&b, lo);
            for t in lo..=lo + 8 {
                for i in 0..n {
                    for j in 0..n {
                        let got = restricted_walk_optimum(&bm, i, j, t).map_err(|e| fail(e, &a))?;
                        let want = bt[i][j].map_or(TropScalar::BOTTOM, TropScalar::int);
                        if got != want {
                            return Err(fail(format!("t = {t}, ({i}, {j}): {got} vs {want}"), &a));
                        }
                        entries += 1;
                    }
                }
                bt = oracle::mul(&bt, &b);
            }
        }
    }
    Ok(format!("{entries} entries"))
}

fn pr_consequences(scale: Scale, seed: u64) -> Check {
    let count = scale.pick(300, 30);
    let mut finite = 0u64;
    for k in 0..count {
        let mut rng = trial_rng(seed, k);
        let n = rng.gen_range(2..=4);
        let w = word_between(&mut rng, 1, 8);
        let dist = dist_for(k, &[0.0, 0.3]);
        let Some((a, b)) = random_pr_pair(&mut rng, n, &w, &dist, 10_000) else {
            return Err(format!("no PR pair sampled for w = {w}, n = {n}"));
        };
        let (ao, bo) = (oracle::from(&a), oracle::from(&b));
        let full = oracle::eval(&w, &ao, &bo);
        let (ka, kb) = (w.count(Letter::A) as i64, w.count(Letter::B) as i64);
        for i in 0..n {
            let want = ao[i][i].zip(bo[i][i]).map(|(x, y)| ka * x + kb * y);
            if full[i][i] != want {
                return Err(format!("diagonal formula fails at {i} for w = {w}, A = {a}, B = {b}"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let Some(v) = full[i][j] else { continue };
                let got = one_cyclic_optimum(&w, &a, &b, i, j).map_err(|e| e.to_string())?;
                if got != TropScalar::int(v) {
                    return Err(format!("1-cyclic optimum {got} vs {v} at ({i}, {j}) for w = {w}, A = {a}, B = {b}"));
                }
                finite += 1;
            }
        }
    }
    Ok(format!("{count} pairs, {finite} finite entries"))
}

const MILESTONE_LIMIT: Duration = Duration::from_secs(30);

fn timed<T>(what: &str, f: impl FnOnce() -> T) -> std::result::Result<(T, Duration), String> {
    let start = Instant::now();
    let out = f();
    let el = start.elapsed();
    if el > MILESTONE_LIMIT {
        return Err(format!("{what} took {el:?}, limit {MILESTONE_LIMIT:?}"));
    }
    Ok((out, el))
}

fn exact_milestones() -> Check {
    let budget = 1_000_000;
    let ab = Identity::parse("ab", "ba").unwrap();
    let (v1, t1) = timed("(ab, ba) on M1", || verify_exact(&ab, Monoid::Full(1), budget))?;
    if !matches!(v1, Ok(ExactVerdict::Proved { .. })) {
        return Err(format!("(ab, ba) on M1: {v1:?}"));
    }
    let (v2, t2) = timed("(ab, ba) on M2", || verify_exact(&ab, Monoid::Full(2), budget))?;
    let Ok(ExactVerdict::Refuted(r)) = v2 else {
        return Err(format!("(ab, ba) on M2: {v2:?}"));
    };
    let (ao, bo) = (oracle::from(&r.a), oracle::from(&r.b));
    let (u, v) = (oracle::eval(&ab.u, &ao, &bo), oracle::eval(&ab.v, &ao, &bo));
    if u[r.i][r.j] == v[r.i][r.j] {
        return Err(format!("emitted counterexample A = {}, B = {} does not separate", r.a, r.b));
    }
    if falsify(&ab, Monoid::Full(2), &FalsifyConfig { trials: 1000, ..Default::default() }).is_none() {
        return Err("falsify found no counterexample to (ab, ba) on M2".into());
    }
    let adjan = Identity::parse("abbaababba", "abbabaabba").unwrap();
    let (v3, t3) = timed("Adjan on U2", || verify_exact(&adjan, Monoid::UpperTriangular(2), budget))?;
    if !matches!(v3, Ok(ExactVerdict::Proved { .. })) {
        return Err(format!("Adjan on U2: {v3:?}"));
    }
    Ok(format!("M1 proof {t1:.1?}, M2 refutation {t2:.1?}, U2 Adjan proof {t3:.1?}"))
}

const STREAMING_LIMIT_PER_1000: Duration = Duration::from_secs(60);

fn construction_end_to_end(scale: Scale, seed: u64) -> Check {
    let lib = BaseLibrary::builtin();
    let admission = FalsifyConfig { trials: scale.pick(1000, 100), seed, ..Default::default() };
    lib.admit_all(&admission).map_err(|e| e.to_string())?;
    let entry = |m: Monoid| lib.get(m).ok_or_else(|| format!("library has no {m} entry"));
    let m1 = entry(Monoid::Full(1))?.identity().map_err(|e| e.to_string())?;
    let m2 = entry(Monoid::Full(2))?.identity().map_err(|e| e.to_string())?;
    let opts = ConstructOptions { variant: Variant::II, ..Default::default() };
    let built_m2 = construct_identity(2, &m1, &entry(Monoid::UpperTriangular(2))?.triangular_base(), &opts)
        .map_err(|e| e.to_string())?;
    let built_m3 = construct_identity(3, &m2, &entry(Monoid::UpperTriangular(3))?.triangular_base(), &opts)
        .map_err(|e| e.to_string())?;
    if built_m3.length() != 19_656 {
        return Err(format!("constructed M3 identity has length {}", built_m3.length()));
    }
    let trials = scale.pick(100_000, 2_000);
    for (id, m) in [(&built_m2, Monoid::Full(2)), (&built_m3, Monoid::Full(3))] {
        let cfg = FalsifyConfig { trials, seed, bottom_masses: vec![0.0, 0.3], ..Default::default() };
        if let Some(ce) = falsify(id, m, &cfg) {
            return Err(format!("constructed {m} identity fails at trial {}: A = {}, B = {}", ce.trial, ce.a, ce.b));
        }
    }
    // Flat evaluation of the 19,656-letter words, cross-checked against the
    // structural one and, on a few trials, the letter-by-letter oracle.
    let stream_trials = scale.pick(1000, 100);
    let (su, sv) = built_m3.sides();
    let start = Instant::now();
    for k in 0..stream_trials {
        let mut rng = trial_rng(seed ^ 0xf1a7, k);
        let d = dist_for(k, &[0.0, 0.3]);
        let (a, b) = (random_matrix(&mut rng, 3, 3, &d), random_matrix(&mut rng, 3, 3, &d));
        let mut ev = Evaluator::new(&a, &b).unwrap();
        let (fu, fv) = (ev.eval(&built_m3.u), ev.eval(&built_m3.v));
        if fu != fv {
            return Err(format!("flat evaluation differs: A = {a}, B = {b}"));
        }
        if k < 5 {
            let o = oracle::eval(&built_m3.u, &oracle::from(&a), &oracle::from(&b));
            if oracle::to(&o) != fu || su.eval(&a, &b) != fu || sv.eval(&a, &b) != fv {
                return Err(format!("evaluations disagree: A = {a}, B = {b}"));
            }
        }
    }
    let per_1000 = start.elapsed().mul_f64(1000.0 / stream_trials as f64);
    if per_1000 > STREAMING_LIMIT_PER_1000 {
        return Err(format!("flat evaluation takes {per_1000:?} per 1000 trials"));
    }
    Ok(format!(
        "M2 (length {}) and M3 (length {}) survive {trials} trials each; flat M3 evaluation {per_1000:.2?} per 1000 trials",
        built_m2.length(),
        built_m3.length()
    ))
}

fn example_lengths(scale: Scale, seed: u64) -> Check {
    let base = LengthParams {
        n: 3,
        nbar: Some(6),
        len_u: 17,
        len_v: 17,
        b_count_u: 8,
        len_p: Some(10),
        len_q_hat: Some(2),
        len_r_hat: Some(2),
        ..Default::default()
    };
    for (variant, t, want) in [(Variant::II, 5, 19_656), (Variant::I, 5, 24_816), (Variant::II, 1, 4_968), (Variant::I, 1, 5_808)] {
        let got = construction_length(&LengthParams { variant, t, ..base.clone() }).map_err(|e| e.to_string())?.length;
        if got != want {
            return Err(format!("variant {variant}, t = {t}: {got}, expected {want}"));
        }
    }
    // Closed form against explicit substitution on random words.
    let cases = scale.pick(200, 40);
    for k in 0..cases {
        let mut rng = trial_rng(seed, k);
        let u = word_between(&mut rng, 2, 8);
        let mut letters: Vec<char> = u.to_plain().chars().collect();
        let shift = rng.gen_range(1..letters.len());
        letters.rotate_left(shift);
        let Ok(base_id) = Identity::new(u, letters.iter().collect::<String>().parse().unwrap()) else { continue };
        let tri = TriangularBase::Triple {
            p: word_between(&mut rng, 1, 4),
            q_hat: word_between(&mut rng, 1, 3),
            r_hat: word_between(&mut rng, 1, 3),
        };
        let n = rng.gen_range(2..=3);
        let opts = ConstructOptions {
            variant: if rng.gen_bool(0.5) { Variant::I } else { Variant::II },
            t: Some(rng.gen_range(1..=3)),
            nbar: Some(rng.gen_range(1..=4)),
            allow_below_threshold: true,
        };
        let Ok(id) = construct_identity(n, &base_id, &tri, &opts) else { continue };
        let report = LengthParams::from_words(n, &base_id, &tri, &opts)
            .and_then(|p| construction_length(&p))
            .map_err(|e| e.to_string())?;
        let got = (report.len_u, report.len_v, report.b_count_u, report.b_count_v);
        let (bu, bv) = (id.u.count(Letter::B) as u128, id.v.count(Letter::B) as u128);
        if got != (id.u.len() as u128, id.v.len() as u128, Some(bu), Some(bv)) {
            return Err(format!("closed form {got:?} disagrees with words for {base_id:?}, {tri:?}, {opts:?}"));
        }
    }
    Ok(format!("19656, 24816, 4968, 5808 reproduced; {cases} random constructions match"))
}

/// Triangular length model: `(q, r) -> (P q P, P r P)` with `P = qr`, from
/// `(ab, ba)`; the second level is Adjan's pair.
fn model_tri(n: usize) -> (Word, Word) {
    let (mut q, mut r): (Word, Word) = ("ab".parse().unwrap(), "ba".parse().unwrap());
    for _ in 1..n {
        let p = q.concat(&r);
        (q, r) = (Word::concat_all([&p, &q, &p]).unwrap(), Word::concat_all([&p, &r, &p]).unwrap());
    }
    (q, r)
}

fn length_recursion() -> Check {
    let (mut len, mut b): (u128, u128) = (2, 1);
    let mut built = Some(Identity::parse("ab", "ba").unwrap());
    let mut lengths = vec![len];
    for n in 2..=6usize {
        let len_q = 2 * 5u128.pow(n as u32 - 1);
        let (t, nbar) = (((n - 1) * (n - 1) + 1) as u128, lcm_upto(n as u64) as u128);
        let params = LengthParams {
            n,
            variant: Variant::I,
            t: t as u64,
            nbar: Some(nbar as u64),
            len_u: len as u64,
            len_v: len as u64,
            b_count_u: b as u64,
            len_q: Some(len_q as u64),
            len_r: Some(len_q as u64),
            b_count_q: Some(len_q as u64 / 2),
            b_count_r: Some(len_q as u64 / 2),
            ..Default::default()
        };
        let report = construction_length(&params).map_err(|e| e.to_string())?;
        // ua has len + 1 - b letters a and b letters b.
        let x = nbar * t * 2 * len_q;
        let y = nbar * (t * 2 * len_q + len_q);
        let na = len + 1 - b;
        let want = na * x + b * y;
        let want_b = na * (x / 2) + b * (y / 2);
        if (report.len_x, report.len_y, report.len_u, report.len_v) != (x, y, want, want) || report.b_count_u != Some(want_b) {
            return Err(format!("n = {n}: report {report:?}, expected lengths {x}, {y}, {want}"));
        }
        if !((len + 1) * x <= want && want <= (len + 1) * y && want > len) {
            return Err(format!("n = {n}: {want} outside [{}, {}]", (len + 1) * x, (len + 1) * y));
        }
        if n <= 3 {
            let (q, r) = model_tri(n);
            let opts = ConstructOptions { variant: Variant::I, ..Default::default() };
            let id = construct_identity(n, built.as_ref().unwrap(), &TriangularBase::Pair { q, r }, &opts)
                .map_err(|e| e.to_string())?;
            if id.u.len() as u128 != want || id.v.len() as u128 != want || id.u.count(Letter::B) as u128 != want_b {
                return Err(format!("n = {n}: explicit words have length {}", id.u.len()));
            }
            built = Some(id);
        }
        (len, b) = (want, want_b);
        lengths.push(len);
    }
    Ok(format!("lengths for n = 1..6: {lengths:?}"))
}
