use amuse_wasm::{leak, select_table};
use serde_json::Value;

#[test]
fn select_table_rows() {
    let v: Value = serde_json::from_str(&select_table(30, 100, "60%, 80%").unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0]["chunks"].as_u64(), rows[0]["excluded"].as_u64(), rows[0]["length"].as_u64()), (Some(5), Some(3), Some(16)));
    assert_eq!(rows[1]["length"], 9);
    assert!(select_table(30, 100, "abc").is_err());
}

#[test]
fn leak_beyond_guarantee_is_complete() {
    let v: Value = serde_json::from_str(&leak(300, 100, "60%", 0.7, 1).unwrap()).unwrap();
    assert!(v["leaked"].as_u64().unwrap() >= v["guarantee"].as_u64().unwrap());
    assert_eq!(v["complete"], true);
    assert_eq!(v["ba"], 1.0);
    let per: u64 = v["per_combination"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(per, 70);
}

#[test]
fn small_leak_can_lose_chunks() {
    let incomplete = (0..50).any(|seed| {
        let v: Value = serde_json::from_str(&leak(30, 100, "80%", 0.05, seed).unwrap()).unwrap();
        v["complete"] == false
    });
    assert!(incomplete);
}

#[test]
fn preview_round_trips_at_default_scale() {
    let p = amuse_wasm::watermark_preview(128, 36.0, 63, 7).unwrap_or_else(|_| panic!("preview failed"));
    assert_eq!(p.original().len(), 128 * 128 * 4);
    assert_eq!(p.ba(), 1.0);
    assert!(p.psnr() > 30.0 && p.psnr().is_finite());
    assert_eq!(p.repeats(), 256 / 63);
}
