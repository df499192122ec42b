use magnon_ep::cli::run_cli_with;
use magnon_ep::scattering::find_cpa_frequencies;
use magnon_ep::sweep::{fig3, fig4, figure_family, FigureCase};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("magnon-ep").chain(args.iter().copied());
    let code = run_cli_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn ep3_symmetric_text() {
    let (code, out, _) = run(&["ep3", "--eta", "1", "--gamma2", "1.5"]);
    assert_eq!(code, 0);
    assert!(out.contains("g_EP3 = 1.7320508076"), "{out}");
    assert!(out.contains("Delta_EP3 = 0.8660254038"));
}

#[test]
fn ep3_json() {
    let (code, out, _) = run(&["ep3", "--eta", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["g_ep3"].as_f64().unwrap() - 3.394).abs() < 1e-3);
    assert!((v["k"].as_f64().unwrap() - 0.494).abs() < 1e-3);
}

#[test]
fn ep2_text() {
    let (code, out, _) = run(&["ep2", "--eta", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("g_EP2 = 3.600"), "{out}");
}

#[test]
fn eigs_below_minimum_fails() {
    let (code, _, err) = run(&["eigs", "--g1", "1.0"]);
    assert_eq!(code, 1);
    assert!(err.contains("CouplingBelowMinimum"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["eigs"]).0, 2);
    assert_eq!(run(&["fig3"]).0, 2);
    assert_eq!(run(&["eigs", "--g1", "abc"]).0, 2);
    assert_eq!(run(&["fig2", "--format", "text"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn eigs_point_and_sweep() {
    let (code, out, _) = run(&["eigs", "--g1", "2.0", "--format", "csv"]);
    assert_eq!(code, 0);
    let (_, rows) = parse_csv(&out);
    let r = &rows[0];
    let mut re = [r[0], r[2], r[4]];
    re.sort_by(f64::total_cmp);
    let s3 = 3f64.sqrt();
    assert!((re[0] + s3).abs() < 1e-10 && re[1].abs() < 1e-10 && (re[2] - s3).abs() < 1e-10);

    let (code, out, _) = run(&["eigs", "--grid", "1.0:3.0:21"]);
    assert_eq!(code, 0);
    let (header, rows) = parse_csv(&out.replace("nan", "NaN"));
    assert_eq!(header[0], "g1");
    assert_eq!(rows.len(), 22);
}

#[test]
fn config_file_drives_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"family":{"eta":1,"k":1,"gamma_2":1.5},"g1_range":{"start":1.6,"stop":2.0,"steps":3},
            "omega_range":{"start":-1,"stop":1,"steps":5}}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, rows) = parse_csv(&out);
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().filter(|r| r[1] == 0.0).all(|r| r[3] < 1e-8));
}

#[test]
fn params_file_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"cavity":{"omega_c":0,"kappa_1":2.25,"kappa_2":2.25,"kappa_int":1.5},
            "magnon_1":{"omega_j":1.3228756555322954,"gamma_j":1.5,"g_j":2},
            "magnon_2":{"omega_j":-1.3228756555322954,"gamma_j":1.5,"g_j":2}}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["cpa", "--params", p]);
    assert_eq!(code, 0);
    assert!(out.starts_with("3 CPA frequencies"), "{out}");

    let (code, out, _) = run(&["spectrum", "--params", p, "--omega", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("|S_tot|^2"));

    let traj = dir.path().join("t.csv");
    let (code, _, _) = run(&["dynamics", "--params", p, "--t-final", "0.5", "--out", traj.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&traj).unwrap();
    assert!(text.lines().all(|l| l.split(',').count() == 7));

    let (code, out, _) = run(&["dynamics", "--params", p, "--rates", "--t-final", "3", "--format", "csv"]);
    assert_eq!(code, 0, "{out}");
    let (_, rows) = parse_csv(&out);
    assert_eq!(rows.len(), 3);
}

#[test]
fn fig3_asymmetric_markers() {
    let (code, out, _) = run(&["fig3", "--case", "asymmetric"]);
    assert_eq!(code, 0);
    let (header, rows) = parse_csv(&out.replace("nan", "NaN"));
    let m = header.iter().position(|h| h == "ep_marker").unwrap();
    let marked: Vec<(f64, f64)> = rows.iter().filter(|r| r[m] != 0.0).map(|r| (r[0], r[m])).collect();
    assert_eq!(marked.len(), 2);
    assert_eq!(marked[0].1, 3.0);
    assert!((marked[0].0 - 3.394).abs() < 1e-3);
    assert_eq!(marked[1].1, 2.0);
    assert!((marked[1].0 - 3.600).abs() < 2e-3);
}

#[test]
fn fig3_fig4_cross_consistency() {
    for case in [FigureCase::Symmetric, FigureCase::Asymmetric] {
        let eig = fig3(case).unwrap();
        let spec = fig4(case).unwrap();
        let ws = spec.axes[1].values.clone();
        let cell = ws[1] - ws[0];
        let nw = ws.len();
        let gs = &spec.axes[0].values;
        let cols = ["re_omega0", "im_omega0", "re_omega_plus", "im_omega_plus", "re_omega_minus", "im_omega_minus"];
        let idx: Vec<usize> = cols.iter().map(|c| eig.column(c).unwrap()).collect();
        for (gi, &g) in gs.iter().enumerate() {
            let row = eig.rows.iter().find(|r| r[0] == g).unwrap();
            if row[1] == 0.0 {
                continue;
            }
            let mut real: Vec<f64> = (0..3)
                .filter(|&b| row[idx[2 * b + 1]].abs() < 1e-7 * 4.5)
                .map(|b| row[idx[2 * b]])
                .collect();
            real.sort_by(f64::total_cmp);
            let fam = figure_family(case).unwrap();
            let block = &spec.rows[gi * nw..(gi + 1) * nw];
            let vals: Vec<f64> = block.iter().map(|r| r[3]).collect();
            let minima: Vec<usize> = (1..nw - 1)
                .filter(|&i| vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1])
                .collect();
            // every real eigenvalue shows up as a grid minimum within one cell
            for x in &real {
                assert!(
                    minima.iter().any(|&i| (ws[i] - x).abs() <= cell),
                    "{case:?} g = {g}: no minimum near {x}"
                );
            }
            // every grid minimum that polishes to an exact zero sits on a real eigenvalue
            let p = fam.realize(g).unwrap();
            for &i in &minima {
                for root in find_cpa_frequencies(&p, (ws[i] - cell, ws[i] + cell)) {
                    assert!(
                        real.iter().any(|x| (root - x).abs() <= cell),
                        "{case:?} g = {g}: zero at {root} but real {real:?}"
                    );
                }
            }
        }
    }
}
