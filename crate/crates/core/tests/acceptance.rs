//! Acceptance suite. Every check prints one `[PASS]` / `[FAIL]` line.
//!
//! Run with `cargo test -p meshplan --test acceptance -- --nocapture` to see
//! the lines.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use meshplan::coverage::{fitness, router_stats, CoverDepthMap, Disk, Placement};
use meshplan::metropolis::{accept, OptimizerConfig, RemovalStrategy};
use meshplan::reduction::{plan, select_router_to_remove, whole_pct, MilestoneLabel, RunReport};
use meshplan::region::{generate_region, parse_region, Cell, GeneratorParams, RegionGrid};
use meshplan::{coverage, is_connected};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize) -> RegionGrid {
    let density: f64 = rng.gen_range(0.3..0.9);
    loop {
        let cover: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(density)).collect();
        let place: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.9)).collect();
        if let Ok(g) = RegionGrid::new(w, h, cover, place) {
            return g;
        }
    }
}

/// Coverage count straight from the definition: a required cell counts when
/// some router is strictly within `radius` of it.
fn brute_fitness(grid: &RegionGrid, centers: &[Cell], radius: u32) -> u32 {
    let r2 = (radius as u64).pow(2);
    grid.cells()
        .filter(|&c| grid.cover(c) && centers.iter().any(|&p| p.dist2(c) < r2))
        .count() as u32
}

fn brute_depth(centers: &[Cell], radius: u32, cell: Cell) -> usize {
    let r2 = (radius as u64).pow(2);
    centers.iter().filter(|&&p| p.dist2(cell) < r2).count()
}

// ---------------------------------------------------------------------------
// Exact-oracle suite
// ---------------------------------------------------------------------------

#[test]
fn oracle_incremental_fitness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF17);
    let mut ops = 0usize;
    let mut mismatches = 0usize;
    for _ in 0..10 {
        let grid = random_grid(&mut rng, 60, 60);
        let legal = grid.legal_cells();
        let radius = rng.gen_range(2..=9);
        let disk = Disk::new(radius);
        let mut map = CoverDepthMap::for_grid(&grid);
        let mut centers: Vec<Cell> = Vec::new();
        let mut running: i64 = 0;
        for step in 0..1000 {
            let pick = rng.gen_range(0..3);
            if centers.is_empty() || (pick == 0 && centers.len() < 40) {
                let c = legal[rng.gen_range(0..legal.len())];
                running += map.add_router(&grid, c, &disk) as i64;
                centers.push(c);
            } else if pick == 1 {
                let i = rng.gen_range(0..centers.len());
                let c = centers.swap_remove(i);
                running -= map.remove_router(&grid, c, &disk).unwrap() as i64;
            } else {
                let i = rng.gen_range(0..centers.len());
                let to = legal[rng.gen_range(0..legal.len())];
                running += map.move_delta(&grid, centers[i], to, &disk);
                map.remove_router(&grid, centers[i], &disk).unwrap();
                map.add_router(&grid, to, &disk);
                centers[i] = to;
            }
            ops += 1;
            if running != fitness(&grid, &map) as i64 {
                mismatches += 1;
            }
            if step % 50 == 0 {
                let full = brute_fitness(&grid, &centers, radius) as i64;
                if full != running {
                    mismatches += 1;
                }
                let mass: u64 = centers
                    .iter()
                    .map(|&c| disk.cells(c, 60, 60).count() as u64)
                    .sum();
                if mass != map.total_depth() {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        "oracle: incremental fitness == full recount",
        mismatches == 0 && ops == 10_000,
        &format!("{ops} operations, {mismatches} mismatches"),
    );
}

/// Reachability from router 0 via Warshall closure of the full adjacency matrix.
fn closure_connected(centers: &[Cell], radius: u32) -> bool {
    let n = centers.len();
    let r2 = 4 * (radius as u64).pow(2);
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i == j || centers[i].dist2(centers[j]) <= r2)
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (dst, hop) in reach[i].iter_mut().zip(via) {
                    *dst |= hop;
                }
            }
        }
    }
    reach[0].iter().all(|&b| b)
}

#[test]
fn oracle_connectivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    let mut agree = 0;
    let mut connected = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=30);
        let radius = rng.gen_range(3..=15);
        let side = rng.gen_range(20..=150);
        let centers: Vec<Cell> = (0..n)
            .map(|_| Cell::new(rng.gen_range(0..side), rng.gen_range(0..side)))
            .collect();
        let expected = closure_connected(&centers, radius);
        connected += expected as usize;
        if is_connected(&centers, radius) == expected {
            agree += 1;
        }
    }
    verdict(
        "oracle: is_connected == transitive closure",
        agree == 1000 && connected > 100 && connected < 900,
        &format!("{agree}/1000 agree ({connected} connected cases)"),
    );
}

#[test]
fn oracle_removal_strategies() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5E1);
    let mut ok = 0;
    for _ in 0..500 {
        let grid = random_grid(&mut rng, 40, 40);
        let legal = grid.legal_cells();
        let radius = rng.gen_range(3..=8);
        let n = rng.gen_range(2..=15);
        let centers: Vec<Cell> = (0..n)
            .map(|_| legal[rng.gen_range(0..legal.len())])
            .collect();
        let placement = Placement::new(radius, centers.clone());
        let map = CoverDepthMap::from_placement(&grid, &placement);

        // brute-force stats per router
        let r2 = (radius as u64).pow(2);
        let stats: Vec<(usize, usize, usize)> = centers
            .iter()
            .map(|&p| {
                let (mut single, mut optional, mut over) = (0, 0, 0);
                for c in grid.cells().filter(|&c| p.dist2(c) < r2) {
                    let d = brute_depth(&centers, radius, c);
                    match (grid.cover(c), d) {
                        (true, 1) => single += 1,
                        (true, _) => over += 1,
                        (false, _) => optional += 1,
                    }
                }
                (single, optional, over)
            })
            .collect();
        let min_single = stats.iter().map(|s| s.0).min().unwrap();
        let max_optional = stats.iter().map(|s| s.1).max().unwrap();
        let max_over = stats.iter().map(|s| s.2).max().unwrap();

        let mut all = true;
        for (i, s) in stats.iter().enumerate() {
            let got = router_stats(&grid, &map, &placement, i).unwrap();
            all &= (
                got.single_coverage,
                got.optional_coverage,
                got.over_coverage,
            ) == *s;
        }
        let pick = |strategy, rng: &mut ChaCha8Rng| {
            select_router_to_remove(&grid, &map, &placement, strategy, rng).unwrap()
        };
        all &= stats[pick(RemovalStrategy::MinSingleCoverage, &mut rng)].0 == min_single;
        all &= stats[pick(RemovalStrategy::MaxOptionalCoverage, &mut rng)].1 == max_optional;
        all &= stats[pick(RemovalStrategy::MaxOverCoverage, &mut rng)].2 == max_over;
        ok += all as usize;
    }
    verdict(
        "oracle: removal strategy attains brute-force extremum",
        ok == 500,
        &format!("{ok}/500 configurations"),
    );
}

#[test]
fn oracle_nr_min() {
    // ceil(area / (r^2 * 3.14)) evaluated with exact rationals
    const CASES: [(usize, u32, usize); 20] = [
        (452, 12, 1),
        (453, 12, 2),
        (10000, 12, 23),
        (1, 1, 1),
        (1, 12, 1),
        (3, 1, 1),
        (4, 1, 2),
        (314, 10, 1),
        (315, 10, 2),
        (19895, 12, 44),
        (19896, 12, 45),
        (20796, 12, 46),
        (24408, 12, 54),
        (12000, 6, 107),
        (113, 6, 1),
        (114, 6, 2),
        (1130, 6, 10),
        (40000, 12, 89),
        (2826, 3, 100),
        (2827, 3, 101),
    ];
    let wrong: Vec<_> = CASES
        .iter()
        .filter(|&&(a, r, want)| coverage::nr_min_for_area(a, r).unwrap() != want)
        .collect();
    verdict(
        "oracle: nr_min on 20 fixed pairs",
        wrong.is_empty(),
        &format!("{} mismatches {wrong:?}", wrong.len()),
    );
}

// ---------------------------------------------------------------------------
// Acceptance rule
// ---------------------------------------------------------------------------

#[test]
fn acceptance_rule_statistics() {
    let t = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trials = 100_000;
    let mut pass = true;
    let mut detail = Vec::new();
    for delta in [-1i64, -5, -10, -20] {
        let hits = (0..trials).filter(|_| accept(delta, t, &mut rng)).count();
        let rate = hits as f64 / trials as f64;
        let want = (t * delta as f64).exp();
        pass &= (rate - want).abs() <= 0.01;
        detail.push(format!("d={delta}: {rate:.4} vs {want:.4}"));
    }
    for delta in [0i64, 1, 5, 100] {
        let hits = (0..trials).filter(|_| accept(delta, t, &mut rng)).count();
        pass &= hits == trials;
        detail.push(format!("d={delta}: {hits}/{trials}"));
    }
    verdict("acceptance rule exp(T*delta)", pass, &detail.join(", "));
}

// ---------------------------------------------------------------------------
// Removal strategies on a strip with known per-router counts
// ---------------------------------------------------------------------------

/// A 1x57 strip with radius 12. Routers: orange x=9, red x=16, helper x=34,
/// black x=47. Per-router (single, optional, over): orange (1, 4, 16),
/// red (2, 0, 21), black (5, 6, 10), helper (8, 0, 15).
fn strip_region() -> String {
    // x 0..=3 optional, 4..=50 required, 51..=56 optional
    format!(
        "EA-REGION v1 57 1\n{}{}{}\n",
        ".".repeat(4),
        "#".repeat(47),
        ".".repeat(6)
    )
}

#[test]
fn removal_strategies_on_strip() {
    let grid = parse_region(&strip_region()).unwrap();
    let (orange, red, helper, black) = (0, 1, 2, 3);
    let placement = Placement::new(
        12,
        vec![
            Cell::new(9, 0),
            Cell::new(16, 0),
            Cell::new(34, 0),
            Cell::new(47, 0),
        ],
    );
    placement.validate(&grid).unwrap();
    let map = CoverDepthMap::from_placement(&grid, &placement);
    let stats: Vec<_> = (0..4)
        .map(|i| {
            let s = router_stats(&grid, &map, &placement, i).unwrap();
            (s.single_coverage, s.optional_coverage, s.over_coverage)
        })
        .collect();
    let counts_ok = stats[orange] == (1, 4, 16)
        && stats[red] == (2, 0, 21)
        && stats[black] == (5, 6, 10)
        && stats[helper] == (8, 0, 15);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut pick = |s| select_router_to_remove(&grid, &map, &placement, s, &mut rng).unwrap();
    let s1 = pick(RemovalStrategy::MinSingleCoverage);
    let s2 = pick(RemovalStrategy::MaxOptionalCoverage);
    let s3 = pick(RemovalStrategy::MaxOverCoverage);
    verdict(
        "strip: strategies select orange / black / red",
        counts_ok && s1 == orange && s2 == black && s3 == red,
        &format!("stats {stats:?}, picks ({s1}, {s2}, {s3})"),
    );
}

// ---------------------------------------------------------------------------
// Statistics over generated instances and seeds
// ---------------------------------------------------------------------------

fn generated_instances() -> Vec<(String, RegionGrid)> {
    [(11u64, 0.28), (12, 0.33), (13, 0.38)]
        .into_iter()
        .map(|(seed, frac)| {
            let params = GeneratorParams {
                width: 200,
                height: 200,
                seed,
                required_fraction: frac,
                prohibited_fraction: 0.05,
                blob_count: (3, 6),
            };
            (
                format!("generated-{seed}"),
                generate_region(&params).unwrap(),
            )
        })
        .collect()
}

#[test]
fn generated_instance_statistics() {
    let started = Instant::now();
    let instances = generated_instances();
    for (name, g) in &instances {
        let frac = g.required_area() as f64 / g.len() as f64;
        assert!(
            (0.25..=0.40).contains(&frac),
            "{name}: required fraction {frac}"
        );
    }
    let jobs: Vec<(usize, u64)> = (0..instances.len())
        .flat_map(|i| (0..3u64).map(move |s| (i, s)))
        .collect();
    let reports: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let config = OptimizerConfig {
                seed,
                removal_strategy: RemovalStrategy::MinSingleCoverage,
                ..OptimizerConfig::with_radius(12)
            };
            plan(&instances[i].1, &config, &instances[i].0).unwrap()
        })
        .collect();
    let elapsed = started.elapsed();

    let mut high_init = 0;
    let mut compact = 0;
    let mut low_optional = 0;
    let mut connected_above_con = 0;
    for r in &reports {
        let m = |l| r.milestone(l).expect("milestone present");
        let init = m(MilestoneLabel::NrInit);
        let max2 = m(MilestoneLabel::NrMax2);
        high_init += (init.required_pct >= 92.0) as usize;
        compact += (max2.router_count as f64 <= 1.45 * r.nr_min as f64) as usize;
        low_optional += (max2.optional_pct <= 22.0) as usize;
        let ok = r.milestone(MilestoneLabel::NrCon).is_some_and(|con| {
            r.milestones
                .iter()
                .filter(|row| row.router_count >= con.router_count)
                .all(|row| row.all_connected)
        });
        connected_above_con += ok as usize;
        println!(
            "  {} seed {}: nr_min {} | {}",
            r.instance,
            r.config.optimizer.seed,
            r.nr_min,
            r.milestones
                .iter()
                .map(|m| format!(
                    "{} {} {} {:.1}%/{:.1}%",
                    m.label,
                    m.router_count,
                    if m.all_connected { "Y" } else { "N" },
                    m.required_pct,
                    m.optional_pct
                ))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    let n = reports.len();
    let a = high_init >= 7;
    let b = compact >= 7;
    let c = low_optional >= 7;
    let d = connected_above_con == n;
    let t = elapsed <= Duration::from_secs(600);
    println!(
        "[{}] generated: required coverage at nr_init >= 92%: {high_init}/{n}",
        if a { "PASS" } else { "FAIL" }
    );
    println!(
        "[{}] generated: nr_max_2 <= 1.45 nr_min: {compact}/{n}",
        if b { "PASS" } else { "FAIL" }
    );
    println!(
        "[{}] generated: optional coverage at nr_max_2 <= 22%: {low_optional}/{n}",
        if c { "PASS" } else { "FAIL" }
    );
    println!(
        "[{}] generated: connected at every milestone >= nr_con: {connected_above_con}/{n}",
        if d { "PASS" } else { "FAIL" }
    );
    println!(
        "[{}] generated: wall clock <= 10 min: {:.1}s",
        if t { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(a && b && c && d && t, "generated-instance criteria failed");
}

// ---------------------------------------------------------------------------
// Determinism and smoke scale (through the binary where the contract is CLI)
// ---------------------------------------------------------------------------

fn meshplan() -> Command {
    Command::new(env!("CARGO_BIN_EXE_meshplan"))
}

#[test]
fn bench_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let region = dir.path().join("det.region");
    let st = meshplan()
        .args([
            "gen",
            "--width",
            "60",
            "--height",
            "60",
            "--seed",
            "5",
            "--required-frac",
            "0.35",
            "--out",
        ])
        .arg(&region)
        .status()
        .unwrap();
    assert!(st.success());

    let mut outputs = Vec::new();
    for jobs in ["1", "3", "2"] {
        let txt = dir.path().join(format!("bench-{jobs}.txt"));
        let json = dir.path().join(format!("bench-{jobs}.json"));
        let st = meshplan()
            .args([
                "bench", "--runs", "3", "--seed", "42", "--radius", "6", "--jobs", jobs, "--region",
            ])
            .arg(&region)
            .arg("--out")
            .arg(&txt)
            .arg("--json")
            .arg(&json)
            .status()
            .unwrap();
        assert!(st.success());
        outputs.push((std::fs::read(&txt).unwrap(), std::fs::read(&json).unwrap()));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        "bench --runs 3 --seed 42 byte-identical for --jobs 1/3/2",
        same,
        &format!(
            "{} text bytes, {} json bytes",
            outputs[0].0.len(),
            outputs[0].1.len()
        ),
    );
}

#[test]
fn smoke_scale_plan() {
    let grid = generate_region(&GeneratorParams {
        width: 60,
        height: 60,
        seed: 3,
        required_fraction: 0.35,
        prohibited_fraction: 0.05,
        blob_count: (2, 4),
    })
    .unwrap();
    let config = OptimizerConfig {
        seed: 1,
        ..OptimizerConfig::with_radius(6)
    };
    let started = Instant::now();
    let report = plan(&grid, &config, "smoke").unwrap();
    let elapsed = started.elapsed();
    let labels: HashSet<_> = report.milestones.iter().map(|m| m.label).collect();
    let rounded_max = report.max_required_whole_pct();
    verdict(
        "smoke 60x60 r=6 plan < 5 s with six milestones",
        elapsed < Duration::from_secs(5) && labels.len() == 6,
        &format!(
            "{:.2}s, {} milestones, nr_min {}, nr_init coverage {}%",
            elapsed.as_secs_f64(),
            labels.len(),
            report.nr_min,
            rounded_max
        ),
    );
    assert_eq!(whole_pct(report.trace[0].required_pct), rounded_max);
}
