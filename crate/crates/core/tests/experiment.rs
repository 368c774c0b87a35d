//! End-to-end runs of the experiment harness at toy scale.

use nodeprune::experiment::{
    cmd_experiment_real, cmd_experiment_sim, cmd_report, read_rows, summarize_real, summarize_sim, ExperimentConfig,
    RealRow, SimRow, SimSummary,
};
use nodeprune::rng::{stream, Gaussian};
use nodeprune::{GridSpec, SimSpec, TrainConfig};

fn tiny_sim(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        replicates: 2,
        seed: 3,
        sim: SimSpec { d: 2, h_star: 1, n: 150, sigma2: 0.5, seed: 0 },
        train: TrainConfig { epochs: 200, ..TrainConfig::default() },
        h: 3,
        output_dir: dir.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn two_replicate_simulation_writes_consistent_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_experiment_sim(&tiny_sim(dir.path())).unwrap();
    assert_eq!((out.total, out.failed), (2, 0));
    let rows: Vec<SimRow> = read_rows(&out.results_csv).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r.error.is_empty());
        assert!(r.agl_nodes.unwrap() <= r.gl_nodes.unwrap());
        assert!(r.gl_distance.unwrap().is_finite());
    }
    let summary: SimSummary = serde_json::from_str(&std::fs::read_to_string(&out.summary_json).unwrap()).unwrap();
    assert_eq!(summary, summarize_sim(&rows));
    let svg = std::fs::read_to_string(dir.path().join("histogram.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn report_recomputes_summary_from_results_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_sim(dir.path());
    let out = cmd_experiment_sim(&cfg).unwrap();
    let original = std::fs::read(&out.summary_json).unwrap();

    // Edit the node counts by hand: the report must reflect the file, not memory.
    let text = std::fs::read_to_string(&out.results_csv).unwrap();
    let mut rows: Vec<SimRow> = read_rows(&out.results_csv).unwrap();
    rows[0].agl_nodes = Some(7);
    let mut w = csv::Writer::from_path(&out.results_csv).unwrap();
    rows.iter().for_each(|r| w.serialize(r).unwrap());
    w.flush().unwrap();
    let edited = cmd_report(&cfg).unwrap();
    let s: SimSummary = serde_json::from_str(&std::fs::read_to_string(&edited.summary_json).unwrap()).unwrap();
    assert_eq!(s.agl_hist.get(&7), Some(&1));

    std::fs::write(&out.results_csv, text).unwrap();
    cmd_report(&cfg).unwrap();
    assert_eq!(std::fs::read(&out.summary_json).unwrap(), original);
}

#[test]
fn toy_csv_real_run_improves_on_initialization() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("toy.csv");
    let mut g = Gaussian::new(stream(99, 0));
    let mut body = String::from("f1,f2,MEDV\n");
    for _ in 0..30 {
        let (a, b) = (g.sample(), g.sample());
        body += &format!("{a},{b},{}\n", 20.0 + 5.0 * (a + 0.5 * b).tanh() + 0.5 * g.sample());
    }
    std::fs::write(&csv, body).unwrap();
    let cfg = ExperimentConfig {
        replicates: 2,
        h: 4,
        grids: GridSpec::boston(),
        train: TrainConfig { epochs: 500, ..TrainConfig::default() },
        output_dir: dir.path().join("out"),
        ..ExperimentConfig::real_defaults()
    };
    let out = cmd_experiment_real(&cfg, &csv, "MEDV").unwrap();
    let rows: Vec<RealRow> = read_rows(&out.results_csv).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r.error.is_empty(), "{}", r.error);
        assert_eq!((r.n_train, r.n_test), (23, 7));
        let init = r.initial_train_err.unwrap();
        assert!(r.agl_train_err.unwrap() <= init);
        assert!(r.gl_train_err.unwrap() <= init);
        assert!(r.erm_train_err.unwrap() <= init);
    }
    let summary = summarize_real(&rows);
    assert_eq!(summary.splits, 2);
    for f in ["results.csv", "summary.json", "nodes_hist.svg", "errors.svg", "config.json"] {
        assert!(dir.path().join("out").join(f).is_file(), "{f} missing");
    }
}

#[test]
fn missing_target_column_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("toy.csv");
    std::fs::write(&csv, "a,b\n1,2\n3,4\n5,6\n7,8\n").unwrap();
    let cfg = ExperimentConfig { output_dir: dir.path().join("out"), ..ExperimentConfig::real_defaults() };
    let err = cmd_experiment_real(&cfg, &csv, "MEDV").unwrap_err();
    assert_eq!(err.exit_code(), 2);
}
