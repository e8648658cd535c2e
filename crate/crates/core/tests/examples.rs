macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(channels_and_kraus, "channels_and_kraus.rs");
example!(dephasing_qsl, "dephasing_qsl.rs");
example!(amplitude_damping_qsl, "amplitude_damping_qsl.rs");
example!(sgad_oracle, "sgad_oracle.rs");
example!(closed_forms, "closed_forms.rs");
example!(figure_presets, "figure_presets.rs");

#[test]
fn channels_and_kraus_runs() {
    channels_and_kraus::run_example().expect("channels example should run");
}

#[test]
fn dephasing_qsl_runs() {
    dephasing_qsl::run_example().expect("dephasing example should run");
}

#[test]
fn amplitude_damping_qsl_runs() {
    amplitude_damping_qsl::run_example().expect("amplitude damping example should run");
}

#[test]
fn sgad_oracle_runs() {
    sgad_oracle::run_example().expect("sgad example should run");
}

#[test]
fn closed_forms_runs() {
    closed_forms::run_example().expect("closed form example should run");
}

#[test]
fn figure_presets_runs() {
    figure_presets::run_example().expect("preset example should run");
}
