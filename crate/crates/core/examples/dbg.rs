use mdm_core::eig::{dominant_eig, block_scan, ScanParams};
use mdm_core::numerics::LogFactorialTable;
use mdm_core::operator::build_r;

fn main() {
    let t = LogFactorialTable::for_blocks(2, 0);
    let b = build_r(&t, 0.0, 0, 2).unwrap();
    println!("matrix: {:?}", b.entries());
    let r = dominant_eig(&b, 1e-12, 100000).unwrap();
    println!("direct: lambda={:.17e} v={:?} it={} res={:.3e}", r.eigenvalue, r.eigenvector, r.iterations, r.residual);
    let scan = block_scan(0.0, &ScanParams { dim: 2, l_max: 0, ..Default::default() }).unwrap();
    let st = scan.optimal_state.unwrap();
    println!("scan:   lambda={:.17e} v={:?} it={}", scan.lambda_max, st.coeffs(), scan.iterations);
}
