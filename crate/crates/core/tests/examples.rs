// Runs every example program so they stay in sync with the library.

macro_rules! example {
    ($name:ident, $call:expr) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                $call.unwrap();
            }
        }
    };
}

example!(one_group, main());
example!(reproduction_number, main());
example!(graphon_families, main());
example!(regimes, main());
example!(endemic_equilibrium, main());
example!(counterexample, main());
example!(vaccination, main());
example!(lockdown, main());
example!(scenario_runner, run(&bundled()));
