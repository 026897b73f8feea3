use std::fs::File;
use std::path::PathBuf;

use crowdsched::model::{
    build_project, parse_dataset, parse_dependencies, project_duration, write_dataset, TaskCatalog, TaskStatus,
};
use crowdsched::predictor::{build_training_samples, LabelMode, PrizeFeature};
use crowdsched::similarity::SimilarityKernel;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> (TaskCatalog, crowdsched::model::Project) {
    let catalog = parse_dataset(File::open(fixture(&format!("{name}.csv"))).unwrap()).unwrap();
    let edges = parse_dependencies(File::open(fixture(&format!("{name}.deps"))).unwrap()).unwrap();
    let ids: Vec<String> = catalog.tasks.iter().map(|t| t.id.clone()).collect();
    let project = build_project(&catalog, name, &ids, &edges).unwrap();
    (catalog, project)
}

fn historical_starts(p: &crowdsched::model::Project) -> Vec<u32> {
    let first = p.tasks().iter().map(|t| t.registration_start).min().unwrap();
    p.tasks().iter().map(|t| (t.registration_start - first) as u32).collect()
}

#[test]
fn motivating_example_as_published() {
    let (catalog, project) = load("motivating19");
    assert_eq!(catalog.len(), 19);
    assert_eq!(catalog.tasks.iter().filter(|t| t.status == TaskStatus::Failed).count(), 11);
    let starts = historical_starts(&project);
    assert!(project.satisfies_dependencies(&starts));
    assert_eq!(project_duration(&project, &starts), 110);
}

#[test]
fn eleven_task_example_has_a_37_day_critical_path() {
    let (_, project) = load("example11");
    assert_eq!(project.len(), 11);
    assert_eq!(project_duration(&project, &project.earliest_starts()), 37);
    let starts = historical_starts(&project);
    assert!(project.satisfies_dependencies(&starts));
    assert_eq!(project_duration(&project, &starts), 110);
}

#[test]
fn dataset_round_trips_through_csv() {
    for name in ["motivating19.csv", "background.csv", "small5.csv"] {
        let catalog = parse_dataset(File::open(fixture(name)).unwrap()).unwrap();
        let mut out = Vec::new();
        write_dataset(&catalog, &mut out, b';').unwrap();
        let back = crowdsched::model::parse_dataset_with(out.as_slice(), crowdsched::model::ParseOptions { delimiter: b';' })
            .unwrap();
        assert_eq!(back, catalog, "{name}");
    }
}

#[test]
fn training_samples_count_open_tasks_independently() {
    let catalog = parse_dataset(File::open(fixture("background.csv")).unwrap()).unwrap();
    let samples = build_training_samples(&catalog, SimilarityKernel::MeanAgreement, LabelMode::DayRatio, PrizeFeature::Monetary);
    assert_eq!(samples.len(), catalog.len());
    for (i, (s, t)) in samples.iter().zip(&catalog.tasks).enumerate() {
        let day = t.registration_start;
        let open: Vec<usize> = (0..catalog.len())
            .filter(|&j| {
                let o = &catalog.tasks[j];
                j != i && o.registration_start <= day && day < o.registration_start + (o.registration_end - o.registration_start).max(1)
            })
            .collect();
        assert_eq!(s.features[2], open.len() as f64, "task {}", t.id);
        let failed = open.iter().filter(|&&j| catalog.tasks[j].valid_submissions == 0).count();
        let ratio = if open.is_empty() { 0.0 } else { failed as f64 / open.len() as f64 };
        assert!((s.label - ratio).abs() < 1e-12, "task {}", t.id);
        assert_eq!(s.features[0], t.duration() as f64);
        assert_eq!(s.features[1], t.prize);
    }
}
