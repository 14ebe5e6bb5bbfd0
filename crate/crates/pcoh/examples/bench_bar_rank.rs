//! Scratch benchmark: rank of bar differentials for an abelian group of
//! order 81 ((C_9)^2) using the grade-triangular schedule: columns ordered by
//! descending word-length grade of the first tuple coordinate, phase-1 rows
//! chosen so each pivots instantly on its own column.

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
    let order: u32 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(81);
    let n: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3);
    unsafe { RADIX = (order as f64).sqrt() as u32 };
    let target: Option<usize> = args.get(3).map(|s| s.parse().unwrap());
    let r = unsafe { RADIX };
    // generators e1, e2 and inverses
    let gens = [r, 1, (r - 1) * r, r - 1];
    // BFS grading
    let ord = order as usize;
    let mut grade = vec![u32::MAX; ord];
    let mut parent_letter = vec![u32::MAX; ord];
    grade[0] = 0;
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(g) = queue.pop_front() {
        for &s in &gens {
            let h = mul(s, g);
            if grade[h as usize] == u32::MAX {
                grade[h as usize] = grade[g as usize] + 1;
                parent_letter[h as usize] = s;
                queue.push_back(h);
            }
        }
    }
    // column position of first coordinate: descending grade, then id
    let mut by_grade: Vec<u32> = (0..order).collect();
    by_grade.sort_by_key(|&a| (std::cmp::Reverse(grade[a as usize]), a));
    let mut pos = vec![0u32; ord];
    for (i, &a) in by_grade.iter().enumerate() {
        pos[a as usize] = i as u32;
    }

    let cols = (ord as u64).pow(n as u32) as usize;
    let rows_total = (ord as u64).pow(n as u32 + 1);
    eprintln!("delta^{n}: {rows_total} rows x {cols} cols (grade-triangular schedule)");
    let t0 = Instant::now();
    let mut ech = RowEchelon::new(cols, P);
    let mut buf: Vec<(u32, u8)> = Vec::with_capacity(8);

    // column index: first coordinate permuted by grade, rest lex
    let colidx = |tuple: &[u32]| -> u32 {
        let mut idx = pos[tuple[0] as usize] as u64;
        for &t in &tuple[1..] {
            idx = idx * ord as u64 + t as u64;
        }
        idx as u32
    };

    // push the row for (g1,...,g_{n+1}) into buf
    let make_row = |buf: &mut Vec<(u32, u8)>, g: &[u32]| {
        buf.clear();
        let mut face = vec![0u32; n];
        // face 0
        face.copy_from_slice(&g[1..]);
        buf.push((colidx(&face), 1));
        for i in 0..n {
            for (j, slot) in face.iter_mut().enumerate() {
                let jj = if j < i { j } else { j + 1 };
                *slot = if j == i { mul(g[i], g[i + 1]) } else { g[jj] };
            }
            let sign = if i % 2 == 0 { P - 1 } else { 1 };
            buf.push((colidx(&face), sign as u8));
        }
        face.copy_from_slice(&g[..n]);
        let sign = if (n + 1) % 2 == 0 { 1 } else { P - 1 };
        buf.push((colidx(&face), sign as u8));
    };

    // phase 1: one row per column (a, b_2..b_n) with grade(a) >= 2:
    // row = (parent_letter(a), parent^{-1} a, b_2, .., b_n)
    let mut g = vec![0u32; n + 1];
    let mut phase1 = 0u64;
    for &a in &by_grade {
        if grade[a as usize] < 2 {
            continue;
        }
        let s = parent_letter[a as usize];
        let rest = mul(inv(s), a);
        let tail_count = (ord as u64).pow(n as u32 - 1);
        for tail in 0..tail_count {
            g[0] = s;
            g[1] = rest;
            let mut t = tail;
            for i in (2..=n).rev() {
                g[i] = (t % ord as u64) as u32;
                t /= ord as u64;
            }
            make_row(&mut buf, &g);
            ech.insert(&mut buf);
            phase1 += 1;
        }
    }
    eprintln!(
        "phase 1: {phase1} rows, rank {}, stored {}, {:.1}s",
        ech.rank(),
        ech.stored_entries(),
        t0.elapsed().as_secs_f64()
    );

    // phase 1.5: completion rows aimed at the low-grade region:
    // (s, g2, b, c) for every generator s and every g2 with grade(s*g2) <= 1
    let tail_count = (ord as u64).pow(n as u32 - 1);
    let mut phase15 = 0u64;
    for &s in &gens {
        for g2 in 0..order {
            if grade[mul(s, g2) as usize] >= 2 {
                continue;
            }
            for tail in 0..tail_count {
                g[0] = s;
                g[1] = g2;
                let mut t = tail;
                for i in (2..=n).rev() {
                    g[i] = (t % ord as u64) as u32;
                    t /= ord as u64;
                }
                make_row(&mut buf, &g);
                ech.insert(&mut buf);
                phase15 += 1;
            }
        }
    }
    eprintln!(
        "phase 1.5: {phase15} rows, rank {}, stored {}, {:.1}s",
        ech.rank(),
        ech.stored_entries(),
        t0.elapsed().as_secs_f64()
    );

    // phase 2: everything else, lex order, early stop at target
    let mut processed = phase1;
    let mut last_growth = 0u64;
    'outer: for row_id in 0..rows_total {
        let mut rr = row_id;
        for i in (0..=n).rev() {
            g[i] = (rr % ord as u64) as u32;
            rr /= ord as u64;
        }
        // skip rows already inserted in phase 1
        let a = mul(g[0], g[1]);
        if grade[a as usize] >= 2 && parent_letter[a as usize] == g[0] {
            continue;
        }
        make_row(&mut buf, &g);
        if ech.insert(&mut buf) {
            last_growth = processed;
        }
        processed += 1;
        if processed % 1_000_000 == 0 {
            eprintln!(
                "  {processed} rows, rank {}, stored {}, {:.1}s",
                ech.rank(),
                ech.stored_entries(),
                t0.elapsed().as_secs_f64()
            );
        }
        if let Some(t) = target {
            if ech.rank() >= t {
                break 'outer;
            }
        }
    }
    println!(
        "rank = {} (of max {cols}), processed {processed}, last growth {last_growth}, stored {}, total {:.1}s",
        ech.rank(),
        ech.stored_entries(),
        t0.elapsed().as_secs_f64()
    );
}
