//! Scratch benchmark: rank of bar differential delta^n via its transpose —
//! one row per C^n basis tuple, entries indexed by C^{n+1} tuples.

use pcoh::fplinalg::RowEchelon;
use std::time::Instant;

const P: u32 = 3;

static mut RADIX: u32 = 9;

fn mul(x: u32, y: u32) -> u32 {
    let r = unsafe { RADIX };
    let (a1, b1) = (x / r, x % r);
    let (a2, b2) = (y / r, y % r);
    ((a1 + a2) % r) * r + (b1 + b2) % r
}

fn inv(x: u32) -> u32 {
    let r = unsafe { RADIX };
    let (a, b) = (x / r, x % r);
    ((r - a) % r) * r + (r - b) % r
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let order: u64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(81);
    let n: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3);
    unsafe { RADIX = (order as f64).sqrt() as u32 };
    let nrows = order.pow(n as u32) as usize; // transpose rows = C^n tuples
    let idx_space = order.pow(n as u32 + 1) as usize;
    eprintln!("delta^{n} transpose: {nrows} rows, index space {idx_space}");
    let t0 = Instant::now();
    let mut ech = RowEchelon::new(idx_space, P);
    let mut buf: Vec<(u32, u8)> = Vec::with_capacity((n + 2) * order as usize);
    let mut x = vec![0u32; n];
    for row_id in 0..nrows as u64 {
        let mut r = row_id;
        for i in (0..n).rev() {
            x[i] = (r % order) as u32;
            r /= order;
        }
        buf.clear();
        // all y in G^{n+1} with a face equal to x, with face signs
        for g in 0..order as u32 {
            // d0 preimage (g, x1..xn): +
            let mut idx = g as u64;
            for &xi in x.iter() {
                idx = idx * order + xi as u64;
            }
            buf.push((idx as u32, 1));
            // middle face i (i = 1..n): y_i*y_{i+1} = x_i, y = (..,g, g^{-1}x_i,..)
            for i in 0..n {
                let mut idx = 0u64;
                for (j, &xj) in x.iter().enumerate().take(i) {
                    idx = idx * order + xj as u64;
                }
                idx = idx * order + g as u64;
                idx = idx * order + mul(inv(g), x[i]) as u64;
                for (j, &xj) in x.iter().enumerate().skip(i + 1) {
                    let _ = j;
                    idx = idx * order + xj as u64;
                }
                let sign = if i % 2 == 0 { P - 1 } else { 1 };
                buf.push((idx as u32, sign as u8));
            }
            // last face preimage (x1..xn, g): sign (-1)^{n+1}
            let mut idx = 0u64;
            for &xi in x.iter() {
                idx = idx * order + xi as u64;
            }
            idx = idx * order + g as u64;
            let sign = if (n + 1) % 2 == 0 { 1 } else { P - 1 };
            buf.push((idx as u32, sign as u8));
        }
        ech.insert(&mut buf);
        if (row_id + 1) % 50_000 == 0 {
            eprintln!(
                "  {} rows, rank {}, stored {} entries, {:.1}s",
                row_id + 1,
                ech.rank(),
                ech.stored_entries(),
                t0.elapsed().as_secs_f64()
            );
        }
    }
    println!(
        "rank = {} , stored {} entries, total {:.1}s",
        ech.rank(),
        ech.stored_entries(),
        t0.elapsed().as_secs_f64()
    );
}
