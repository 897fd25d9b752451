//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use brlab::binaryforms::{dual_surjectivity_check, restricted_koszul};
use brlab::bounds::{
    bound_formula_theorem1, bound_koszul_with, bound_matmul_restricted, compare_table, lickteig_square, LRule,
};
use brlab::exterior::koszul_flattening;
use brlab::rank::{rank_certified, rank_exact_q, rank_mod_p, CertStrategy, RankStrategy};
use brlab::repcomb::{
    binomial, cauchy_wedge, conjugate, dim_schur, kernel_dim_formula, kernel_dim_pieri, kernel_modules,
    partitions_bounded, pieri_add_box, Partition,
};
use brlab::scalars::{default_primes, PrimeField, DEFAULT_PRIMES};
use brlab::tensor::{matmul_tensor, rank_one_tensor};
use brlab::{FieldTag, SparseMatrix, Tensor3};

const Q: FieldTag = FieldTag::Rationals;

type Check = Result<String, String>;

/// Id, description, time limit, check.
type Criterion = (&'static str, &'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn part(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn ac1_example_rank() -> Check {
    for l in 1..=3 {
        let k = koszul_flattening(&matmul_tensor(3, 3, l, Q).map_err(err)?, 4).map_err(err)?;
        let want = 306 * l;
        let q = rank_exact_q(&k.matrix).map_err(err)?.rank;
        ensure(q == want, || format!("l={l}: rank over Q {q}, expected {want}"))?;
        for p in DEFAULT_PRIMES {
            let r = rank_mod_p(&k.matrix, PrimeField::new(p).map_err(err)?).map_err(err)?.rank;
            ensure(r == want, || format!("l={l}: rank mod {p} is {r}, expected {want}"))?;
        }
    }
    let cert =
        bound_koszul_with(&matmul_tensor(3, 3, 3, Q).map_err(err)?, 4, &RankStrategy::ExactQ).map_err(err)?;
    ensure(cert.rank == Some(918) && cert.divisor == 70 && cert.bound == 14, || {
        format!("l=3 certificate rank {:?} divisor {} bound {}", cert.rank, cert.divisor, cert.bound)
    })?;
    Ok("ranks 306, 612, 918 over Q and three primes; bound 14".into())
}

fn ac2_kernel_grid() -> Check {
    let mut checked = 0;
    for m in 1..=12usize {
        for n in 1..=m {
            if m * n > 12 {
                continue;
            }
            let p_max = (m * n).div_ceil(2).saturating_sub(1);
            for p in m..=p_max {
                let formula = kernel_dim_formula(m, n, p, 1).map_err(err)?;
                let pieri = kernel_dim_pieri(m, n, p, 1).map_err(err)?;
                let k = koszul_flattening(&matmul_tensor(m, n, 1, Q).map_err(err)?, p).map_err(err)?;
                let rank = rank_exact_q(&k.matrix).map_err(err)?.rank;
                let computed = (k.source_dim() - rank) as u128;
                ensure(formula.validated, || format!("({m},{n},{p}) reported outside validated range"))?;
                ensure(formula.value == pieri && pieri == computed, || {
                    format!("({m},{n},{p}): formula {} pieri {pieri} rank-kernel {computed}", formula.value)
                })?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "empty grid".into())?;
    Ok(format!("{checked} (m,n,p) triples agree three ways"))
}

fn ac3_restricted_injective() -> Check {
    let mut checked = 0;
    for m in 1..=6 {
        for n in 1..=m {
            for l in 1..=2 {
                let cert = bound_matmul_restricted(m, n, l).map_err(err)?;
                let full = n * l * binomial((m + n - 1) as u64, (n - 1) as u64) as usize;
                ensure(cert.cols == Some(full) && cert.rank == Some(full), || {
                    format!("({m},{n},{l}): rank {:?} of {:?} columns, expected {full}", cert.rank, cert.cols)
                })?;
                let formula = bound_formula_theorem1(m, n, l).map_err(err)?;
                ensure(cert.bound == formula, || {
                    format!("({m},{n},{l}): bound {} vs formula {formula}", cert.bound)
                })?;
                checked += 1;
            }
        }
    }
    let b = bound_matmul_restricted(3, 3, 3).map_err(err)?.bound;
    ensure(b == 15, || format!("(3,3,3) bound {b}"))?;
    for n in 1..=6 {
        let b = bound_matmul_restricted(n, n, n).map_err(err)?.bound;
        let want = (2 * n * n - n) as u128;
        ensure(b == want, || format!("({n},{n},{n}) bound {b}, expected {want}"))?;
    }
    Ok(format!("{checked} shapes injective, (3,3,3) -> 15, (n,n,n) -> 2n^2-n for n <= 6"))
}

fn ac4_dual_surjectivity() -> Check {
    for m in 1..=6 {
        for n in 1..=m {
            ensure(dual_surjectivity_check(m, n).map_err(err)?, || format!("({m},{n}) not surjective"))?;
            let k = restricted_koszul(m, n, 1, n - 1).map_err(err)?;
            ensure(k.matrix.rows() >= k.matrix.cols(), || format!("({m},{n}) has more columns than rows"))?;
        }
    }
    Ok("all 1 <= n <= m <= 6".into())
}

fn random_nonzero_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..len).map(|_| rng.gen_range(-5..=5)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

fn ac5_rank_one_law() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut flattenings = 0;
    for trial in 0..200 {
        let a = rng.gen_range(2..=6);
        let (b, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let vecs: Vec<_> = [a, b, c]
            .iter()
            .map(|&len| {
                random_nonzero_vector(&mut rng, len).into_iter().map(|x| Q.from_i64(x)).collect::<Vec<_>>()
            })
            .collect();
        let t = rank_one_tensor(&vecs[0], &vecs[1], &vecs[2]).map_err(err)?;
        for p in 0..a {
            let k = koszul_flattening(&t, p).map_err(err)?;
            let r = rank_exact_q(&k.matrix).map_err(err)?.rank as u128;
            let want = binomial((a - 1) as u64, p as u64);
            ensure(r == want, || format!("trial {trial}: a={a} p={p} rank {r}, expected {want}"))?;
            flattenings += 1;
        }
    }
    Ok(format!("200 tensors, {flattenings} flattenings"))
}

/// Semistandard tableaux of shape `pi` with entries in `1..=v`, counted by
/// filling cells row by row.
fn count_ssyt(pi: &[usize], v: usize) -> u128 {
    fn fill(pi: &[usize], v: usize, grid: &mut Vec<Vec<usize>>, row: usize, col: usize) -> u128 {
        if row == pi.len() {
            return 1;
        }
        if col == pi[row] {
            return fill(pi, v, grid, row + 1, 0);
        }
        let left = if col > 0 { grid[row][col - 1] } else { 1 };
        let above = if row > 0 { grid[row - 1][col] + 1 } else { 1 };
        let mut total = 0;
        for x in left.max(above)..=v {
            grid[row][col] = x;
            total += fill(pi, v, grid, row, col + 1);
        }
        total
    }
    let mut grid = pi.iter().map(|&len| vec![0; len]).collect();
    fill(pi, v, &mut grid, 0, 0)
}

fn ac6_representation_theory() -> Check {
    ensure(conjugate(&part(&[3, 1])) == part(&[2, 1, 1]), || "conjugate (3,1)".into())?;
    ensure(conjugate(&part(&[2, 2])) == part(&[2, 2]), || "conjugate (2,2)".into())?;
    ensure(conjugate(&Partition::empty()) == Partition::empty(), || "conjugate of empty".into())?;

    ensure(dim_schur(&part(&[4, 1]), 3) == 24, || "dim S_(4,1) C^3".into())?;
    ensure(dim_schur(&part(&[2, 1, 1]), 3) == 3, || "dim S_(2,1,1) C^3".into())?;
    ensure(dim_schur(&part(&[1, 1, 1, 1]), 3) == 0, || "dim S_(1,1,1,1) C^3".into())?;

    ensure(pieri_add_box(&part(&[2, 1, 1]), 3) == vec![part(&[3, 1, 1]), part(&[2, 2, 1])], || {
        "Pieri on (2,1,1)".into()
    })?;
    ensure(pieri_add_box(&part(&[3, 1]), 3) == vec![part(&[4, 1]), part(&[3, 2]), part(&[3, 1, 1])], || {
        "Pieri on (3,1)".into()
    })?;

    let summands = cauchy_wedge(4, 3, 3).map_err(err)?;
    let pairs: Vec<(Partition, Partition)> =
        summands.iter().map(|s| (s.pi_m.clone(), s.pi_u.clone())).collect();
    let expected = vec![
        (part(&[3, 1]), part(&[2, 1, 1])),
        (part(&[2, 2]), part(&[2, 2])),
        (part(&[2, 1, 1]), part(&[3, 1])),
    ];
    ensure(pairs == expected, || format!("Cauchy summands {pairs:?}"))?;
    let dims: Vec<u128> = summands.iter().map(|s| s.dimension).collect();
    ensure(dims == vec![45, 36, 45] && dims.iter().sum::<u128>() == binomial(9, 4), || {
        format!("Cauchy dimensions {dims:?}")
    })?;

    ensure(kernel_modules(3, 3, 4).map_err(err)? == vec![(part(&[2, 1, 1]), part(&[4, 1]))], || {
        "kernel module of (3,3,4)".into()
    })?;

    let mut oracle_checks = 0;
    for size in 0..=6 {
        for pi in partitions_bounded(size, size, size) {
            for v in 1..=4 {
                let (hook, brute) = (dim_schur(&pi, v), count_ssyt(pi.parts(), v));
                ensure(hook == brute, || format!("dim S_{pi} C^{v}: {hook} vs {brute} tableaux"))?;
                oracle_checks += 1;
            }
        }
    }
    Ok(format!("worked examples reproduced; {oracle_checks} dimensions match tableau counts"))
}

fn random_integer_matrix(rng: &mut ChaCha8Rng) -> SparseMatrix {
    let (rows, cols) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
    let density = rng.gen_range(0.2..0.9);
    let triplets = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).filter_map(|(r, c)| {
        let keep = rng.gen_bool(density);
        let v: i64 = rng.gen_range(-9..=9) * [1, 2, 3, 6][rng.gen_range(0..4)];
        keep.then(|| (r, c, Q.from_i64(v)))
    });
    let triplets: Vec<_> = triplets.collect();
    SparseMatrix::from_triplets(rows, cols, Q, triplets).unwrap()
}

fn ac7_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut primes: Vec<PrimeField> =
        [2u64, 3, 5, 7, 65521].iter().map(|&p| PrimeField::new(p).unwrap()).collect();
    primes.extend(default_primes(3));
    let small = CertStrategy::MultiPrime(primes[..3].to_vec());
    let default = CertStrategy::multi_prime(3);
    let mut drops = 0;
    for trial in 0..100 {
        let m = random_integer_matrix(&mut rng);
        let exact = rank_exact_q(&m).map_err(err)?.rank;
        for &p in &primes {
            let r = rank_mod_p(&m, p).map_err(err)?.rank;
            ensure(r <= exact, || format!("matrix {trial}: rank mod {} is {r} > {exact}", p.modulus()))?;
            drops += (r < exact) as usize;
        }
        for strategy in [&small, &default] {
            let r = rank_certified(&m, strategy).map_err(err)?.rank;
            ensure(r <= exact, || format!("matrix {trial}: multiprime rank {r} > {exact}"))?;
        }
    }
    for trial in 0..20 {
        let dims = (rng.gen_range(3..=5), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let entries = (0..dims.0)
            .flat_map(|i| (0..dims.1).flat_map(move |j| (0..dims.2).map(move |k| (i, j, k))))
            .filter_map(|(i, j, k)| {
                let v: i64 = rng.gen_range(-2..=2) * 6;
                (v != 0).then(|| (i, j, k, Q.from_i64(v)))
            })
            .collect::<Vec<_>>();
        let t = Tensor3::new(Q, dims, entries).map_err(err)?;
        for p in 0..dims.0 {
            let exact = bound_koszul_with(&t, p, &RankStrategy::ExactQ).map_err(err)?.bound;
            for strategy in
                [RankStrategy::MultiPrime(primes[..3].to_vec()), RankStrategy::MultiPrime(default_primes(3))]
            {
                let mp = bound_koszul_with(&t, p, &strategy).map_err(err)?.bound;
                ensure(mp <= exact, || {
                    format!("tensor {trial} p={p}: multiprime bound {mp} > exact {exact}")
                })?;
            }
        }
    }
    Ok(format!(
        "100 matrices, 8 primes each ({drops} strict drops observed); certificates never exceed exact"
    ))
}

fn ac8_closed_forms() -> Check {
    ensure(lickteig_square(3) == 14, || format!("lickteig_square(3) = {}", lickteig_square(3)))?;
    let rows = compare_table(3, 8, LRule::EqualN, 0).map_err(err)?;
    ensure(rows.len() == 6, || format!("{} rows", rows.len()))?;
    for r in &rows {
        let n = r.n as u128;
        let lickteig = r.lickteig.ok_or_else(|| format!("n={n}: no Lickteig column"))?;
        ensure(r.theorem1 == 2 * n * n - n, || format!("n={n}: theorem1 {}", r.theorem1))?;
        ensure((3 * n * n + n - 2).is_multiple_of(2) && lickteig == (3 * n * n + n - 2) / 2, || {
            format!("n={n}: lickteig {lickteig}")
        })?;
        ensure(r.theorem1 > lickteig, || format!("n={n}: {} does not exceed {lickteig}", r.theorem1))?;
    }
    Ok("2n^2-n > (3n^2+n-2)/2 for n = 3..8".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "Koszul rank 306l for M<3,3,l>, p=4", Duration::from_secs(30), ac1_example_rank),
        ("AC2", "kernel dimension grid", Duration::from_secs(300), ac2_kernel_grid),
        ("AC3", "restricted flattening injective", Duration::from_secs(120), ac3_restricted_injective),
        ("AC4", "dual surjectivity", Duration::from_secs(60), ac4_dual_surjectivity),
        ("AC5", "rank-one law", Duration::from_secs(60), ac5_rank_one_law),
        ("AC6", "representation theory", Duration::from_secs(60), ac6_representation_theory),
        ("AC7", "modular soundness", Duration::from_secs(60), ac7_soundness),
        ("AC8", "closed-form comparison", Duration::from_secs(1), ac8_closed_forms),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("{id} PASS {name}: {detail} ({:.2}s)", elapsed.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("{id} FAIL {name}: {why} ({:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
