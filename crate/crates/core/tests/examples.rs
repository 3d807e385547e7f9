macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));
        }

        #[test]
        fn $name() {
            $name::run_example().expect(concat!(stringify!($name), " should run"));
        }
    };
}

example!(verify_theorems);
example!(influence_estimation);
example!(solve_regression);
example!(greedy_vs_exact);
example!(local_expansion);
example!(bench_sweep);
example!(fundamental_matrix);
