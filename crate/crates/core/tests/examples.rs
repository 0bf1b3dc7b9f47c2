macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main();
            }
        }
    };
}

example!(filter_response);
example!(detect_steps);
example!(calibrate_subject);
example!(protocol_replay);
example!(gait_map);
example!(metrics);
example!(synth_cohort);
