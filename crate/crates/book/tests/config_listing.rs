use std::path::Path;

use dce::harness::ExperimentConfig;

#[test]
fn documented_config_is_the_default() {
    let chapter = include_str!("../../../book/src/harness.md");
    let start = chapter.find("```toml\n").expect("toml listing") + "```toml\n".len();
    let len = chapter[start..].find("```").unwrap();
    let listed = ExperimentConfig::from_toml_str(&chapter[start..start + len], Path::new("harness.md")).unwrap();
    assert_eq!(listed, ExperimentConfig::default());
}
