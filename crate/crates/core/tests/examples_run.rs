mod alpha_search_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/alpha_search.rs"));
}

#[test]
fn alpha_search_example_runs() {
    alpha_search_example::run_example().expect("alpha_search example should run");
}

mod architecture_sweep_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/architecture_sweep.rs"));
}

#[test]
fn architecture_sweep_example_runs() {
    architecture_sweep_example::run_example().expect("architecture_sweep example should run");
}

mod basis_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/basis.rs"));
}

#[test]
fn basis_example_runs() {
    basis_example::run_example().expect("basis example should run");
}

mod datasets_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/datasets.rs"));
}

#[test]
fn datasets_example_runs() {
    datasets_example::run_example().expect("datasets example should run");
}

mod error_propagation_audit_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/error_propagation_audit.rs"));
}

#[test]
fn error_propagation_audit_example_runs() {
    error_propagation_audit_example::run_example().expect("error_propagation_audit example should run");
}

mod gengap_sweep_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gengap_sweep.rs"));
}

#[test]
fn gengap_sweep_example_runs() {
    gengap_sweep_example::run_example().expect("gengap_sweep example should run");
}

mod hp_fit_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/hp_fit.rs"));
}

#[test]
fn hp_fit_example_runs() {
    hp_fit_example::run_example().expect("hp_fit example should run");
}

mod scenario_comparison_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenario_comparison.rs"));
}

#[test]
fn scenario_comparison_example_runs() {
    scenario_comparison_example::run_example().expect("scenario_comparison example should run");
}

mod stability_probe_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/stability_probe.rs"));
}

#[test]
fn stability_probe_example_runs() {
    stability_probe_example::run_example().expect("stability_probe example should run");
}

mod train_network_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/train_network.rs"));
}

#[test]
fn train_network_example_runs() {
    train_network_example::run_example().expect("train_network example should run");
}

mod wavelet_projection_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/wavelet_projection.rs"));
}

#[test]
fn wavelet_projection_example_runs() {
    wavelet_projection_example::run_example().expect("wavelet_projection example should run");
}
