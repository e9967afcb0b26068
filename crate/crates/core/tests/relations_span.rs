use ellrmx::elliptic::{EllipticContext, LatticeIndex};
use ellrmx::expr::Point;
use ellrmx::ncalgebra::{RelationVector, WordSpace};
use ellrmx::relations::{
    relation_vectors_all, sklyanin_coeffs_eta, sklyanin_coeffs_theta, slnm_family_coeffs, slnm_family_vectors,
    tv_relation_vectors, Family, ZeroBetaReading,
};
use ellrmx::rmatrix::{DynamicalParams, ThirdTerm};
use ellrmx::span::span_equal;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params(m: usize, seed: f64) -> DynamicalParams {
    DynamicalParams {
        hbar: c(0.19 + 0.05 * seed, 0.27),
        q1: (0..m).map(|k| c(0.13 + 0.31 * k as f64 + 0.07 * seed, 0.21 + 0.17 * k as f64)).collect(),
        q2: (0..m).map(|k| c(0.47 + 0.23 * k as f64, 0.12 + 0.19 * k as f64 + 0.03 * seed)).collect(),
    }
}

fn point(p: &DynamicalParams) -> Point {
    Point {
        q1: p.q1.clone(),
        q2: p.q2.clone(),
        hbar: p.hbar,
        z: vec![],
    }
}

#[test]
fn order_one_families_match_tv() {
    let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
    for m in [2, 3] {
        for seed in [0.0, 1.0, 2.0] {
            let p = params(m, seed);
            let fam = relation_vectors_all(&ctx, 1, &p, ThirdTerm::Scaled).unwrap();
            let tv = tv_relation_vectors(&ctx, m, &point(&p)).unwrap();
            let cmp = span_equal(&fam, &tv, 1e-8).unwrap();
            assert!(cmp.equal, "M={m} {cmp:?}");
        }
    }
}

fn eta_vectors(ctx: &EllipticContext, n: usize, m: usize, i: usize, j: usize, p: &DynamicalParams, eta: Complex64, scale: Complex64) -> Vec<RelationVector> {
    let space = WordSpace::new(n, m);
    let mut out = Vec::new();
    for alpha in LatticeIndex::all(n) {
        for beta in LatticeIndex::all(n) {
            if alpha == beta {
                continue;
            }
            let rel = sklyanin_coeffs_eta(ctx, alpha, beta, eta, p.hbar).unwrap();
            let coords = rel.to_ncsum(j, i, m, ctx.tau()).unwrap().freeze_quadratic(ctx, &point(p), &space).unwrap();
            out.push(RelationVector::new(coords.into_iter().map(|x| x * scale).collect(), "eta"));
        }
    }
    out
}

#[test]
fn family_one_is_eta_sklyanin() {
    let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
    for (n, m) in [(2, 1), (3, 1), (2, 2)] {
        let p = params(m, 1.0);
        for i in 0..m {
            for j in 0..m {
                let fam: Vec<_> = LatticeIndex::all(n)
                    .flat_map(|a| LatticeIndex::all(n).map(move |b| (a, b)))
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| slnm_family_coeffs(&ctx, Family::Sklyanin, &[i, j], a, b, &p, ThirdTerm::Scaled).unwrap())
                    .collect();
                let eta = p.q2[i] - p.q1[j];
                let cmp = span_equal(&fam, &eta_vectors(&ctx, n, m, i, j, &p, eta, c(1.0, 0.0)), 1e-8).unwrap();
                assert!(cmp.equal, "({n},{m}) ({i},{j}) {cmp:?}");
            }
        }
    }
}

#[test]
fn rescaled_generators_keep_the_span() {
    let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
    let p = params(1, 0.0);
    let eta = p.q2[0] - p.q1[0];
    let a = eta_vectors(&ctx, 2, 1, 0, 0, &p, eta, c(1.0, 0.0));
    let b = eta_vectors(&ctx, 2, 1, 0, 0, &p, eta, c(-3.7, 2.2));
    assert!(span_equal(&a, &b, 1e-12).unwrap().equal);
}

#[test]
fn eta_equal_hbar_gives_theta_form_span() {
    let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
    let hbar = c(0.21, 0.33);
    let n = 3;
    let space = WordSpace::new(n, 1);
    let pt = Point {
        q1: vec![c(0.0, 0.0)],
        q2: vec![hbar],
        hbar,
        z: vec![],
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for alpha in LatticeIndex::all(n) {
        for beta in LatticeIndex::all(n) {
            let x = sklyanin_coeffs_eta(&ctx, alpha, beta, hbar, hbar).unwrap();
            let y = sklyanin_coeffs_theta(&ctx, alpha, beta, hbar, ZeroBetaReading::AlphaMinusGamma).unwrap();
            let flat = |r: &ellrmx::relations::SklyaninRelation| {
                let coords = r.to_ncsum(0, 0, 1, ctx.tau()).unwrap().freeze_quadratic(&ctx, &pt, &space).unwrap();
                RelationVector::new(coords, "s")
            };
            a.push(flat(&x));
            b.push(flat(&y));
        }
    }
    assert!(span_equal(&a, &b, 1e-12).unwrap().equal);
}

#[test]
fn families_are_empty_where_indices_run_out() {
    let ctx = EllipticContext::new(c(0.3, 0.8)).unwrap();
    let p = params(1, 0.0);
    for f in [Family::SameSecond, Family::SameFirst, Family::Mixed] {
        assert!(slnm_family_vectors(&ctx, f, 2, &p, ThirdTerm::Scaled).unwrap().is_empty());
    }
    assert!(!slnm_family_vectors(&ctx, Family::Sklyanin, 2, &p, ThirdTerm::Scaled).unwrap().is_empty());
}
