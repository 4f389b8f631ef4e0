use ontic::bclm::{audit_model, construct_family, seeded_audit, BclmFamily, PairEvidence};
use ontic::omodel::{canonical_psi_ontic, FiniteDistribution};
use ontic::qcore::inner_product;
use ontic::Error;
use rayon::prelude::*;

#[test]
fn family_properties() {
    let fam = construct_family(0, 0).unwrap();
    assert_eq!(fam.psis.len(), 16);
    for s in &fam.psis {
        assert!((inner_product(&fam.phi, s).unwrap().norm() - 0.5).abs() < 1e-10);
    }
    assert_eq!(fam.pairs.len(), 120);
    let mut cross = 0;
    for p in &fam.pairs {
        let same = fam.psi_origins[p.i].0 == fam.psi_origins[p.j].0;
        match &p.evidence {
            PairEvidence::Orthogonal { .. } => assert!(same),
            PairEvidence::Triple {
                squared_overlaps,
                criterion,
                ..
            } => {
                assert!(!same);
                assert!(*criterion);
                for a in squared_overlaps {
                    assert!((a - 0.25).abs() < 1e-10);
                }
                cross += 1;
            }
        }
    }
    assert_eq!(cross, 96);
    println!("certified fraction {}", fam.certified_fraction());
    assert!(fam.certified_fraction() >= 0.9);
}

#[test]
fn canonical_model_audits_to_zero() {
    let fam = construct_family(0, 0).unwrap();
    let m = canonical_psi_ontic(&fam.fragment().unwrap()).unwrap();
    let r = audit_model(&m, &fam).unwrap();
    assert_eq!(r.omega_bar, 0.0);
    assert!(r.pass && r.strict_witness_ok);
}

#[test]
fn planted_three_way_atom_is_rejected() {
    let fam = construct_family(0, 0).unwrap();
    let mut m = canonical_psi_ontic(&fam.fragment().unwrap()).unwrap();
    // Move weight of phi, psi00 and psi04 onto one shared atom.
    let n = m.lambda_size;
    for name in ["phi", "psi00", "psi04"] {
        let p = m.preparations.get_mut(name).unwrap();
        let own = p.0.iter().position(|&w| w == 1.0).unwrap();
        let mut w = vec![0.0; n];
        w[own] = 0.9;
        w[0] += 0.1;
        *p = FiniteDistribution(w);
    }
    assert!(matches!(audit_model(&m, &fam), Err(Error::Precondition(_))));
}

#[test]
fn seeded_lp_audits_respect_the_bound() {
    let fam = construct_family(0, 0).unwrap();
    let runs: Vec<_> = (0..20u64)
        .into_par_iter()
        .map(|s| seeded_audit(&fam, s).unwrap().0)
        .collect();
    for r in &runs {
        println!(
            "seed {} |Λ|={} gadgets={:?} total={:.6} mean={:.6} min={:.3e}",
            r.seed, r.lambda_size, r.gadgets, r.lp_total, r.report.omega_bar, r.report.min_omega
        );
        assert!(r.report.omega_bar <= 0.0625 + 1e-8);
        assert!(r.report.omega_sum <= 1.0 + 1e-8);
        assert!(r.report.strict_witness_ok);
        assert!(r.report.min_omega <= r.report.omega_bar);
        let mean: f64 = r.report.rows.iter().map(|x| x.omega).sum::<f64>() / 16.0;
        assert_eq!(mean, r.report.omega_bar);
    }
    assert!(runs.iter().any(|r| r.lp_total > 1e-3), "audits never found overlap");
    let _ = BclmFamily::psi_name(0);
}
