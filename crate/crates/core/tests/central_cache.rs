use mollifier_core::central::{
    cache_path, central_values_hurwitz, central_values_smoothed, read_cache, write_cache, CentralMethod,
};
use mollifier_core::characters::CharacterTable;
use num_complex::Complex64;

#[test]
fn cache_round_trip_through_a_file() {
    let dir = std::env::temp_dir().join(format!("mollifier-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for q in [5u64, 12, 101] {
        let set = central_values_smoothed(q, 0.0).unwrap();
        let path = cache_path(&dir, q, 0.0, CentralMethod::SmoothedAfe);
        write_cache(&set, std::fs::File::create(&path).unwrap()).unwrap();
        let back = read_cache(std::fs::File::open(&path).unwrap()).unwrap();
        assert_eq!(back, set);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn truncated_cache_is_an_error() {
    let set = central_values_smoothed(13, 0.0).unwrap();
    let mut bytes = Vec::new();
    write_cache(&set, &mut bytes).unwrap();
    bytes.truncate(bytes.len() - 3);
    assert!(read_cache(bytes.as_slice()).is_err());
}

#[test]
fn conjugate_characters_give_conjugate_values() {
    for q in [13u64, 37, 101, 200] {
        let table = CharacterTable::new(q).unwrap();
        let set = central_values_smoothed(q, 0.0).unwrap();
        for (i, j) in set.conjugate_positions(&table).into_iter().enumerate() {
            assert!((set.values[i] - set.values[j].conj()).norm() < 1e-8);
        }
    }
}

#[test]
fn shifted_point_agrees_with_hurwitz() {
    let q = 13u64;
    let alpha = 1.0 / (q as f64).ln();
    let smoothed = central_values_smoothed(q, alpha).unwrap();
    let hurwitz = central_values_hurwitz(q, Complex64::new(0.5 + alpha, 0.0)).unwrap();
    assert!(smoothed.max_difference(&hurwitz).unwrap() < 1e-8);
}
