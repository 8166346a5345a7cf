use mdm_core::eig::{BlockScanner, ScanParams};
use mdm_core::tradeoff::{delta_g_curve, scan_p};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("single");

    match mode {
        "single" => {
            let dim: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
            let l_max: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(30);
            let p: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.5);
            let t0 = Instant::now();
            let scanner = BlockScanner::new(ScanParams::with_dim(dim, l_max)).unwrap();
            let t1 = Instant::now();
            let scan = scanner.scan(p).unwrap();
            let t2 = Instant::now();
            println!(
                "dim={dim} l_max={l_max} p={p}: lambda={:.12} L*={} iters={} degeneracy={:.6} build={:?} scan={:?}",
                scan.lambda_max, scan.l_star, scan.iterations, scan.degeneracy_ratio,
                t1 - t0, t2 - t1
            );
        }
        "curve" => {
            let dim: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
            let l_max: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(30);
            let count: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(101);
            let t0 = Instant::now();
            let grid: Vec<f64> = (0..count)
                .map(|i| 0.999 * i as f64 / (count - 1) as f64)
                .collect();
            let points: Vec<_> = scan_p(&grid, &ScanParams::with_dim(dim, l_max))
                .unwrap()
                .into_iter()
                .map(|r| r.unwrap())
                .collect();
            let curve = delta_g_curve(&points);
            let (best_idx, best) = curve
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
                .unwrap();
            println!(
                "dim={dim} l_max={l_max} n_p={count}: max dG={:.6} at F={:.6} (p={:.4}), elapsed={:?}",
                best.1, best.0, points[best_idx].p, t0.elapsed()
            );
            // iteration stats
            let max_it = points.iter().map(|p| p.iterations).max().unwrap();
            let sum_it: usize = points.iter().map(|p| p.iterations).sum();
            println!("iterations: max={max_it} mean={}", sum_it / points.len());
            // nearest to F=0.794
            let near = points
                .iter()
                .zip(&curve)
                .min_by(|a, b| {
                    (a.1 .0 - 0.794)
                        .abs()
                        .partial_cmp(&(b.1 .0 - 0.794).abs())
                        .unwrap()
                })
                .unwrap();
            println!("nearest F=0.794: F={:.6} dG={:.6}", near.1 .0, near.1 .1);
        }
        "channel" => {
            let dim: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
            let l_max: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(30);
            let count: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(101);
            let t0 = Instant::now();
            let grid: Vec<f64> = (0..count)
                .map(|i| 0.999 * i as f64 / (count - 1) as f64)
                .collect();
            let points: Vec<_> = mdm_core::channel::channel_scan(&grid, &ScanParams::with_dim(dim, l_max))
                .unwrap()
                .into_iter()
                .map(|r| r.unwrap())
                .collect();
            let best = points
                .iter()
                .max_by(|a, b| a.delta_f.partial_cmp(&b.delta_f).unwrap())
                .unwrap();
            println!(
                "dim={dim}: max dF={:.6} at p={:.4}, elapsed={:?}",
                best.delta_f, best.p, t0.elapsed()
            );
            for pt in points.iter().filter(|pt| pt.delta_f < 0.0) {
                println!("negative dF at p={:.4}: {:.3e}", pt.p, pt.delta_f);
            }
        }
        "witness" => {
            let dim: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
            let p: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.7393);
            let scanner = BlockScanner::new(ScanParams::with_dim(dim, 30)).unwrap();
            let scan = scanner.scan(p).unwrap();
            let state = scan.optimal_state.unwrap();
            let report = mdm_core::gaussianity::gaussianity_witness(&state);
            println!("p={p} dim={dim}:\n{report}");
            let f = mdm_core::schmidt::fidelity_output(&state);
            let deltas = mdm_core::tradeoff::schmidt_delta(&state, f).unwrap();
            let pos = deltas.iter().filter(|(_, d)| *d > 1e-6).count();
            let neg = deltas.iter().filter(|(_, d)| *d < -1e-6).count();
            println!("F={f:.6}; delta_c sign counts: +{pos} -{neg}");
            let maxd = deltas
                .iter()
                .map(|(_, d)| d.abs())
                .fold(0.0f64, f64::max);
            println!("max |delta_c| = {maxd:.3e}");
        }
        other => eprintln!("unknown mode {other}"),
    }
}
