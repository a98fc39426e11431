use wlax_core::*;
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (fam, r, p, floor) = if args.len() > 3 {
        (args[1].clone(), args[2].parse().unwrap(), args[3].parse().unwrap(),
         args.get(4).map(|s| s.parse().unwrap()).unwrap_or(-6))
    } else { ("sp".into(), 2usize, 2usize, -8i64) };
    let family = liealg::Family::parse(&fam).unwrap();
    let (rect, alg) = rect::build_rect(family, r, p).unwrap();
    let res = laxop::lax(&alg, floor).unwrap();
    let explicit = rect::explicit_l(&rect, &alg).reduce_mod_j(&alg);
    let mut bad = 0;
    for row in 0..r { for c in 0..r {
        let e = &explicit.at(row,c);
        let l = &res.l.at(row,c);
        let mut exps: Vec<i64> = e.terms.keys().chain(l.terms.keys()).copied().filter(|&x| x >= floor).collect();
        exps.sort(); exps.dedup();
        for e2 in exps.iter().rev() {
            let a = e.coeff(*e2); let b = l.coeff(*e2);
            if a != b {
                bad += 1;
                if bad < 6 {
                    println!("entry ({row},{c}) z^{}:", scalar::render_half(*e2));
                    println!("  explicit = {}", alg.render_elem(&a));
                    println!("  pipeline = {}", alg.render_elem(&b));
                }
            }
        }
    }}
    println!("mismatched coefficients: {bad}");
}
