use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dtds::premodel::{random_premodel, RandomPremodel};
use dtds::syntax::closure;
use dtds::transforms::{unravel, UnravelOptions};
use dtds::{Formula, LassoSystem, Premodel, WindowSystem};

fn premodel(seed: u64) -> Premodel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = RandomPremodel::new(rng.gen_range(1..=5), 2, &["p", "q"]);
    random_premodel(&mut rng, &cfg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn premodels_round_trip(seed in any::<u64>()) {
        let m = premodel(seed);
        prop_assert_eq!(Premodel::from_json(&m.to_json(), false).unwrap(), m);
    }

    #[test]
    fn lasso_systems_and_windows_round_trip(seed in any::<u64>()) {
        let m = premodel(seed);
        let seeds: Vec<usize> = (0..m.len()).collect();
        let sys = unravel(&m, &closure(&Formula::atom("p")), &seeds, UnravelOptions::with_horizon(2)).unwrap();
        let back = LassoSystem::from_json(&sys.to_json(), None, false).unwrap();
        prop_assert_eq!(back.histories(), sys.histories());
        prop_assert_eq!(back.horizon(), sys.horizon());
        prop_assert_eq!(back.base(), sys.base());
        let w = sys.window(2);
        prop_assert_eq!(WindowSystem::from_json(&w.to_json()).unwrap(), w);
    }
}

#[test]
fn invalid_premodels_need_permission() {
    let text = include_str!("../examples/data/offer.json").replace(r#"["free", "free"]]"#, "]");
    let text = text.replace(r#"["bound", "bound"], ]"#, r#"["bound", "bound"]]"#);
    assert!(Premodel::from_json(&text, false).is_err());
    let m = Premodel::from_json(&text, true).unwrap();
    assert!(!m.audit().is_clean());
}

#[test]
fn malformed_files_are_rejected() {
    assert!(Premodel::from_json("{}", true).is_err());
    assert!(Premodel::from_json(r#"{"agents": 1, "states": ["a", "a"], "box": [["a"]], "agt": [["a"]], "next": []}"#, true).is_err());
    assert!(WindowSystem::from_json("[]").is_err());
}
