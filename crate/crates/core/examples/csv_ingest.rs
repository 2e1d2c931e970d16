//! Loading a headed CSV with categorical columns and preparing relabeled caches.

use fairgda::dataset::{load_csv, make_synthetic, read_cache, write_cache, Schema};

fn main() -> fairgda::Result<()> {
    let dir = std::env::temp_dir().join("fairgda-csv-ingest");
    std::fs::create_dir_all(&dir).map_err(|e| fairgda::Error::Dataset(e.to_string()))?;
    let csv = dir.join("people.csv");
    let mut text = String::from("age,workclass,hours,sex,income\n");
    for i in 0..400u32 {
        let sex = if i % 3 == 0 { "Female" } else { "Male" };
        let work = ["Private", "State-gov", "Self-emp"][(i % 7 % 3) as usize];
        let income = if (i * 37 % 100) < 25 + 10 * u32::from(sex == "Male") { ">50K" } else { "<=50K" };
        text += &format!("{},{work},{},{sex},{income}\n", 18 + i % 50, 20 + i % 40);
    }
    std::fs::write(&csv, text).map_err(|e| fairgda::Error::Dataset(e.to_string()))?;

    let schema = Schema {
        label_positive: Some(">50K".into()),
        sensitive_positive: Some("Male".into()),
        sensitive_as_feature: true,
        ..Schema::new("income", "sex")
    };
    let data = load_csv(&csv, &schema)?;
    println!("{} rows, features {:?}", data.len(), data.feature_names());
    println!("label/sensitive correlation {:.3}", data.label_correlation()?);

    for target in [0.3, 0.6] {
        let s = make_synthetic(&data, target, 0)?;
        let path = dir.join(format!("corr-{target}.csv"));
        write_cache(&s.dataset, &path)?;
        assert_eq!(read_cache(&path)?.labels(), s.dataset.labels());
        println!("target {target}: measured {:.3}, {} flips -> {}", s.correlation, s.flips, path.display());
    }
    Ok(())
}
