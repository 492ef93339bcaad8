//! Every example runs to completion.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                run().unwrap();
            }
        }
    };
}

example!(entropy_toolkit);
example!(classical_scan);
example!(measured_grover);
example!(engine_crosscheck);
example!(violation_sweep);
example!(monte_carlo_copies);
example!(halt_on_hit);
example!(report_formats);
