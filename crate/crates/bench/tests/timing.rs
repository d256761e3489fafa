use bipsym_bench::{bench, bench_with, write_csv, BenchError, BenchOptions, EngineKind, Example};

const HEADER: &str = "example,engine,n,m,steps,total_ns,mean_step_ns,fs_nodes,fb_nodes,fc_nodes,fp_nodes,seed";

fn quick() -> BenchOptions {
    BenchOptions {
        repetitions: 3,
        warmup_steps: 100,
    }
}

#[test]
fn enum_bus_record() {
    let r = bench(Example::Bus { n: 4 }, EngineKind::Enum, 10_000, 1).unwrap();
    assert_eq!(
        (r.example.as_str(), r.engine.as_str(), r.n, r.m),
        ("bus", "enum", 4, None)
    );
    assert_eq!(r.steps, 10_000);
    assert_eq!(r.repetitions.len(), 5);
    assert!(r.mean_step_ns > 0.0 && r.total_ns > 0);
    assert!(r.stats.is_none());
}

#[test]
fn symbolic_tasks_record_has_node_counts() {
    let r = bench_with(Example::Tasks { n: 4, m: 2 }, EngineKind::Symbolic, 500, 2, quick()).unwrap();
    assert_eq!(r.m, Some(2));
    let stats = r.stats.unwrap();
    assert!(stats.fs_nodes > 0 && stats.fb_nodes > 0 && stats.fc_nodes > 0 && stats.fp_nodes > 0);
    let median = r.mean_step_ns;
    let below = r.repetitions.iter().filter(|x| x.mean_step_ns() < median).count();
    let above = r.repetitions.iter().filter(|x| x.mean_step_ns() > median).count();
    assert!(below <= 1 && above <= 1);
    assert!(r.mean_of_repetitions() > 0.0);
}

#[test]
fn zero_steps_is_rejected() {
    let err = bench(Example::Bus { n: 1 }, EngineKind::Enum, 0, 0).unwrap_err();
    assert!(matches!(err, BenchError::NoSteps));
    let err = bench(Example::Tasks { n: 1, m: 1 }, EngineKind::Enum, 10, 0).unwrap_err();
    assert!(matches!(err, BenchError::Gen(_)));
}

#[test]
fn csv_layout() {
    let records = vec![
        bench_with(Example::Bus { n: 2 }, EngineKind::Enum, 50, 7, quick()).unwrap(),
        bench_with(Example::Tasks { n: 2, m: 1 }, EngineKind::Symbolic, 50, 7, quick()).unwrap(),
    ];
    let mut out = Vec::new();
    write_csv(&mut out, &records).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    let enum_row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(enum_row.len(), 12);
    assert_eq!(&enum_row[..5], ["bus", "enum", "2", "", "50"]);
    assert!(enum_row[7..11].iter().all(|c| c.is_empty()));
    assert_eq!(enum_row[11], "7");
    let sym_row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(&sym_row[..4], ["tasks", "symbolic", "2", "1"]);
    assert!(sym_row[7..11].iter().all(|c| c.parse::<usize>().unwrap() > 0));
}
