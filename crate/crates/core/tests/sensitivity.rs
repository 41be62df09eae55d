use heisenbn::bn::{joint_posterior, Evidence, InferenceOptions};
use heisenbn::defect::{ids, Answer, DefectModelParams, DefectTemplate, ProjectScenario};
use heisenbn::sensitivity::{mutual_information, tornado_analysis};

fn reference() -> (heisenbn::bn::Network, Evidence) {
    let s = ProjectScenario::uniform(2, 30.0, 12000.0, Answer::point(3));
    let dn = DefectTemplate::new(DefectModelParams::default()).unwrap().instantiate(&s).unwrap();
    (dn.network, dn.evidence)
}

#[test]
fn better_verification_means_fewer_field_defects() {
    let (net, ev) = reference();
    let r = tornado_analysis(&net, &ev, ids::FIELD_DEFECTS, &[ids::VERIFICATION_QUALITY]).unwrap();
    let sweeps = &r.inputs[0].sweeps;
    assert!(sweeps[4].mean.unwrap() <= sweeps[0].mean.unwrap());
}

#[test]
fn certification_matters_less_than_verification_quality() {
    let (net, ev) = reference();
    let r = tornado_analysis(&net, &ev, ids::FIELD_DEFECTS, &[ids::CERTIFICATION, ids::VERIFICATION_QUALITY]).unwrap();
    assert_eq!(r.inputs[0].input, ids::VERIFICATION_QUALITY);
    assert!(r.inputs[1].range < r.inputs[0].range);
}

#[test]
fn sweeps_agree_with_joint_conditionals() {
    let (net, ev) = reference();
    let r = tornado_analysis(&net, &ev, ids::DEFECTS_INSERTED, &[ids::DEVELOPMENT_QUALITY]).unwrap();
    let reps = net.node(ids::DEFECTS_INSERTED).unwrap().states().representatives(net.tail_factor()).unwrap();
    let joint = joint_posterior(&net, &ev, &[ids::DEVELOPMENT_QUALITY, ids::DEFECTS_INSERTED], InferenceOptions::default()).unwrap();
    let nt = joint.cards[1];
    for (i, sweep) in r.inputs[0].sweeps.iter().enumerate() {
        let row = &joint.probabilities[i * nt..(i + 1) * nt];
        let px: f64 = row.iter().sum();
        let mean: f64 = row.iter().zip(&reps).map(|(p, v)| p * v).sum::<f64>() / px;
        assert!((sweep.mean.unwrap() - mean).abs() < 1e-9 * mean.max(1.0));
    }
}

#[test]
fn forcing_the_observed_state_reproduces_the_base_mean() {
    let (net, ev) = reference();
    // hours_level is hard evidence in every scenario
    let r = tornado_analysis(&net, &ev, ids::DEFECTS_FOUND, &[ids::HOURS_LEVEL]).unwrap();
    let observed = match ev.get(ids::HOURS_LEVEL).unwrap() {
        heisenbn::bn::Finding::Hard(s) => s.clone(),
        _ => unreachable!(),
    };
    let sweep = r.inputs[0].sweeps.iter().find(|s| s.state == observed).unwrap();
    assert_eq!(sweep.mean.unwrap(), r.base_mean);
}

#[test]
fn mutual_information_is_symmetric_on_the_template() {
    let (net, ev) = reference();
    let a = mutual_information(&net, &ev, ids::VERIFICATION_QUALITY, ids::FIELD_DEFECTS).unwrap();
    let b = mutual_information(&net, &ev, ids::FIELD_DEFECTS, ids::VERIFICATION_QUALITY).unwrap();
    assert!(a > 0.0);
    assert!((a - b).abs() < 1e-10);
}
