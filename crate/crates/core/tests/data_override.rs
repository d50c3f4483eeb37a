//! Runs in its own process: the data loaders cache per process and the
//! override is read from the environment.

use fingerlab::bounds::{regenerate_table, TableId, TableLimits};
use fingerlab::data::{self, DATA_DIR_ENV};
use fingerlab::Error;

#[test]
fn override_directory_replaces_bundled_files() {
    let dir = std::env::temp_dir().join(format!("fingerlab-data-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let lit = data::read("literature.json").unwrap().into_owned();
    let lit = lit.replacen("\"value\": 12", "\"value\": 11", 1);
    std::fs::write(dir.join("literature.json"), &lit).unwrap();
    std::env::set_var(DATA_DIR_ENV, &dir);

    let loaded = data::literature().unwrap();
    assert!(loaded.cover_free.iter().all(|f| f.value != 12 || f.m != 9));
    assert!(matches!(data::states(), Err(Error::MissingData(_))));
    assert!(matches!(
        data::read("table1.csv"),
        Err(Error::MissingData(_))
    ));
    assert!(regenerate_table(TableId::I, &TableLimits::cached()).is_err());

    std::fs::remove_dir_all(&dir).unwrap();
}
