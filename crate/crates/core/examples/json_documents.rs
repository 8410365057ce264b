//! Writing and reading the JSON documents, and what a schema violation
//! looks like.

use isostat::io::{from_json_str, load, map_from_json_str, save, to_json_string};
use isostat::iterate::{default_grid, free_trig_chart};
use isostat::{example_free_map, pullback_field, sample_jets, Chart, SmoothMap, StatStructure};

fn main() -> isostat::Result<()> {
    let dir = std::env::temp_dir().join("isostat-json-example");
    std::fs::create_dir_all(&dir)?;

    let poly = example_free_map(2)?;
    save(&dir.join("example2.json"), &poly)?;
    let back = isostat::io::load_map(&dir.join("example2.json"))?;
    println!("polynomial map round trip: {}", back == SmoothMap::Poly(poly));

    let grid = default_grid(8);
    let trig = free_trig_chart(&grid, 8, 7)?;
    let text = to_json_string(&trig)?;
    println!("trigonometric map detected by its period key: {}", matches!(map_from_json_str(&text)?, SmoothMap::Trig(_)));

    let jets = sample_jets(&SmoothMap::Trig(trig), &Chart::Grid(grid))?;
    let s = pullback_field(&jets).structure;
    save(&dir.join("structure.json"), &s)?;
    let again: StatStructure = load(&dir.join("structure.json"))?;
    println!("structure round trip bit-exact: {}", again == s);

    let broken = r#"{"n": 2, "g": [[1, 0, 1], [1, 0]], "T": [[0, 0, 0, 0], [0, 0, 0, 0]]}"#;
    println!("{}", from_json_str::<StatStructure>(broken).unwrap_err());
    Ok(())
}
