//! Scratch benchmark for certified cohomology dimensions.

use pcoh::groups::{build_abelian, build_wreath, Permutation};
use pcoh::homalg::{BarComplex, Budget, MinimalResolution};
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "c9".into());
    let t0 = Instant::now();
    match which.as_str() {
        "c9" => {
            let g = build_abelian(3, &[9]).unwrap();
            let res = MinimalResolution::new(&g, 7).unwrap();
            let bar = BarComplex::new(&g, 7, Budget::default()).unwrap();
            let report = bar.dims_certified(6, &res).unwrap();
            println!("C_9 dims {:?} routes {:?} in {:.1}s", report.dims, report.routes, t0.elapsed().as_secs_f64());
        }
        "c27" => {
            let g = build_abelian(3, &[27]).unwrap();
            let res = MinimalResolution::new(&g, 7).unwrap();
            let bar = BarComplex::new(&g, 7, Budget::default()).unwrap();
            let report = bar.dims_certified(6, &res).unwrap();
            println!("C_27 dims {:?} routes {:?} in {:.1}s", report.dims, report.routes, t0.elapsed().as_secs_f64());
        }
        "c99" => {
            let g = build_abelian(3, &[9, 9]).unwrap();
            let res = MinimalResolution::new(&g, 4).unwrap();
            let bar = BarComplex::new(&g, 4, Budget::default()).unwrap();
            let report = bar.dims_certified(3, &res).unwrap();
            println!("C_9^2 dims {:?} routes {:?} in {:.1}s", report.dims, report.routes, t0.elapsed().as_secs_f64());
        }
        "wreath" => {
            let c3 = build_abelian(3, &[3]).unwrap();
            let w = build_wreath(&c3, 3, &[Permutation(vec![1, 2, 0])]).unwrap();
            let res = MinimalResolution::new(&w, 4).unwrap();
            println!("wreath betti: {:?} in {:.1}s", (0..=4).map(|n| res.betti(n).unwrap()).collect::<Vec<_>>(), t0.elapsed().as_secs_f64());
            let bar = BarComplex::new(&w, 4, Budget::default()).unwrap();
            for n in 0..=2usize {
                let (r, full) = bar.differential_rank(n, None).unwrap();
                println!("  rank d^{n} = {r} (full={full}) at {:.1}s", t0.elapsed().as_secs_f64());
            }
            let zs = res.bar_cocycles(&bar, 3).unwrap();
            println!("  transported {} cocycles at {:.1}s", zs.len(), t0.elapsed().as_secs_f64());
            for z in &zs {
                assert!(bar.delta_is_zero_streamed(z).unwrap());
            }
            println!("  delta-verified at {:.1}s", t0.elapsed().as_secs_f64());
            let report = bar.dims_certified(3, &res).unwrap();
            println!("wreath dims {:?} routes {:?} in {:.1}s", report.dims, report.routes, t0.elapsed().as_secs_f64());
        }
        _ => eprintln!("unknown benchmark"),
    }
}
