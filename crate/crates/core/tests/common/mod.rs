//! Shared test support: fixture loading, independent geometric oracles,
//! planted-mixture and synthetic-city generators, and ARI.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use urbanform_core::features::Aggregation;
use urbanform_core::features::{
    assemble_matrix, FeatureCatalog, FeatureColumn, FeatureMatrix, Normalization, TagSelector,
};
use urbanform_core::geometry::{Boundary, LatLon, LocalFrame};
use urbanform_core::gmm::init::rng_for;
use urbanform_core::ingest::{
    clip_to_boundary, parse_boundary_str, parse_osm_bytes, Entity, EntitySet, TagMap,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn load_manifest() -> serde_json::Value {
    let text = std::fs::read_to_string(fixture_path("mini_city_manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn load_fixture_raw() -> (EntitySet, Vec<String>) {
    let bytes = std::fs::read(fixture_path("mini_city.osm")).unwrap();
    parse_osm_bytes(&bytes, "mini_city.osm").unwrap()
}

pub fn load_fixture_boundary() -> Boundary {
    let text = std::fs::read_to_string(fixture_path("mini_city_boundary.geojson")).unwrap();
    parse_boundary_str(&text, "mini_city").unwrap().0
}

pub fn load_fixture_clipped() -> (EntitySet, Boundary) {
    let (set, _) = load_fixture_raw();
    let boundary = load_fixture_boundary();
    let clipped = clip_to_boundary(&set, &boundary).unwrap();
    (clipped, boundary)
}

/// Winding-number point-in-polygon with an explicit on-edge check;
/// an implementation independent of the even-odd ray cast in the crate.
pub fn winding_contains(p: (f64, f64), rings: &[Vec<(f64, f64)>]) -> bool {
    let mut winding = 0i64;
    for ring in rings {
        for w in ring.windows(2) {
            let (ax, ay) = w[0];
            let (bx, by) = w[1];
            let cross = (bx - ax) * (p.1 - ay) - (by - ay) * (p.0 - ax);
            if cross == 0.0
                && p.0 >= ax.min(bx)
                && p.0 <= ax.max(bx)
                && p.1 >= ay.min(by)
                && p.1 <= ay.max(by)
            {
                return true; // on edge counts inside
            }
            if ay <= p.1 {
                if by > p.1 && cross > 0.0 {
                    winding += 1;
                }
            } else if by <= p.1 && cross < 0.0 {
                winding -= 1;
            }
        }
    }
    winding != 0
}

/// Exact containment in a convex hexagon via half-plane signs; independent
/// of both the crate's ray casting and its axial rounding.
pub fn hexagon_contains(p: (f64, f64), vertices: &[(f64, f64); 6]) -> bool {
    let mut sign = 0i8;
    for i in 0..6 {
        let a = vertices[i];
        let b = vertices[(i + 1) % 6];
        let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        if cross == 0.0 {
            continue;
        }
        let s = if cross > 0.0 { 1 } else { -1 };
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return false;
        }
    }
    true
}

/// Adjusted Rand Index between two labelings.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for i in 0..n {
        table[a[i]][b[i]] += 1;
    }
    let choose2 = |x: u64| (x * x.saturating_sub(1)) as f64 / 2.0;
    let sum_ij: f64 = table.iter().flatten().map(|&x| choose2(x)).sum();
    let sum_a: f64 = table
        .iter()
        .map(|row| choose2(row.iter().sum::<u64>()))
        .sum();
    let sum_b: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum::<u64>()))
        .sum();
    let total = choose2(n as u64);
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() < 1e-15 {
        return 1.0;
    }
    (sum_ij - expected) / (max_index - expected)
}

/// Standard normal via Box-Muller on the given RNG.
pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub struct PlantedMixture {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub means: Vec<Vec<f64>>,
    pub sigma: f64,
}

/// Spherical Gaussian blobs with the given means, `n_per` points each.
pub fn planted_blobs(seed: u64, means: &[Vec<f64>], sigma: f64, n_per: usize) -> PlantedMixture {
    let mut rng = rng_for(seed, 0xB10B, 0);
    let d = means[0].len();
    let mut rows = Vec::with_capacity(means.len() * n_per);
    let mut labels = Vec::with_capacity(means.len() * n_per);
    for (c, mean) in means.iter().enumerate() {
        for _ in 0..n_per {
            let row: Vec<f64> = (0..d).map(|j| mean[j] + sigma * gauss(&mut rng)).collect();
            rows.push(row);
            labels.push(c);
        }
    }
    PlantedMixture {
        rows,
        labels,
        means: means.to_vec(),
        sigma,
    }
}

/// Builds a FeatureMatrix directly from rows (tagged as z-scored input for
/// the clustering stage).
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> FeatureMatrix {
    let n = rows.len();
    let d = rows[0].len();
    let cols: Vec<FeatureColumn> = (0..d)
        .map(|j| FeatureColumn {
            name: format!("f{j}"),
            values: (0..n).map(|i| rows[i][j]).collect(),
            aggregation: Aggregation::Intensive,
        })
        .collect();
    let ids: Vec<i64> = (0..n as i64).collect();
    let mut m = assemble_matrix(&cols, "synthetic", &ids, None).unwrap();
    m.normalization = Normalization::Zscore;
    m
}

/// Per-patch entity counts of one planted typology.
#[derive(Debug, Clone, Copy)]
pub struct TypologyProfile {
    pub restaurants: usize,
    pub natural: usize,
    pub residential: usize,
    pub parking: usize,
}

/// Typology profiles; index = planted typology id. Contrasts are strong at
/// patch scale but drown in placement noise when cells shrink to a quarter
/// patch, which is what the grid-size sweep must detect.
pub const TYPOLOGIES: [TypologyProfile; 4] = [
    // T0: residential fabric.
    TypologyProfile {
        restaurants: 0,
        natural: 2,
        residential: 12,
        parking: 1,
    },
    // T1: green space.
    TypologyProfile {
        restaurants: 2,
        natural: 12,
        residential: 4,
        parking: 0,
    },
    // T2: food and beverage core.
    TypologyProfile {
        restaurants: 12,
        natural: 2,
        residential: 4,
        parking: 1,
    },
    // T3: parking-dominated.
    TypologyProfile {
        restaurants: 1,
        natural: 0,
        residential: 1,
        parking: 12,
    },
];

/// Catalog for synthetic cities: the four count features above, no network.
pub fn synth_catalog() -> FeatureCatalog {
    let entries = vec![
        urbanform_core::features::CatalogEntry::Count(
            TagSelector::new("amenity", Some("restaurant")).unwrap(),
        ),
        urbanform_core::features::CatalogEntry::Count(TagSelector::new("natural", None).unwrap()),
        urbanform_core::features::CatalogEntry::Count(
            TagSelector::new("building", Some("residential")).unwrap(),
        ),
        urbanform_core::features::CatalogEntry::Count(
            TagSelector::new("amenity", Some("parking")).unwrap(),
        ),
    ];
    FeatureCatalog {
        entries,
        walkable: urbanform_core::features::DEFAULT_WALKABLE
            .iter()
            .map(|s| s.to_string())
            .collect(),
    }
}

pub struct SynthCity {
    pub entities: EntitySet,
    pub boundary: Boundary,
    pub half_m: f64,
    pub patch_m: f64,
    /// typology id per patch, row-major by (pi, pj).
    pub patch_typology: Vec<usize>,
    pub patches_per_side: usize,
}

impl SynthCity {
    /// Planted typology of the patch containing a local-frame point.
    pub fn typology_at(&self, x: f64, y: f64) -> usize {
        let np = self.patches_per_side as i64;
        let pi = (((x + self.half_m) / self.patch_m).floor() as i64).clamp(0, np - 1);
        let pj = (((y + self.half_m) / self.patch_m).floor() as i64).clamp(0, np - 1);
        self.patch_typology[(pi * np + pj) as usize]
    }
}

/// Deterministic pseudo-random patch pattern (mixes patch indices).
pub fn scattered_pattern(pi: i64, pj: i64) -> usize {
    let h = (pi.wrapping_mul(2654435761) ^ pj.wrapping_mul(40503)) as u64;
    let mut z = h.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    (z >> 32) as usize
}

/// Generates a square synthetic city: side `2 * half_m`, square typology
/// patches of `patch_m`, entities jittered uniformly inside their patch.
/// `pattern(pi, pj)` picks the typology id from `typology_ids`; profile
/// counts are multiplied by `density_scale`.
#[allow(clippy::too_many_arguments)]
pub fn synth_city_scaled(
    seed: u64,
    name: &str,
    center: (f64, f64),
    half_m: f64,
    patch_m: f64,
    typology_ids: &[usize],
    density_scale: usize,
    pattern: impl Fn(i64, i64) -> usize,
) -> SynthCity {
    let frame = LocalFrame::new(center.0, center.1).unwrap();
    let dlat = half_m / frame.meters_per_deg_lat;
    let dlon = half_m / frame.meters_per_deg_lon;
    let ring = vec![
        LatLon::new(center.0 - dlat, center.1 - dlon).unwrap(),
        LatLon::new(center.0 - dlat, center.1 + dlon).unwrap(),
        LatLon::new(center.0 + dlat, center.1 + dlon).unwrap(),
        LatLon::new(center.0 + dlat, center.1 - dlon).unwrap(),
        LatLon::new(center.0 - dlat, center.1 - dlon).unwrap(),
    ];
    let boundary = Boundary::new(ring, vec![], name.to_string()).unwrap();

    let np = (2.0 * half_m / patch_m).round() as i64;
    let mut entities: Vec<Entity> = Vec::new();
    let mut next_id = 1i64;
    let mut patch_typology = Vec::with_capacity((np * np) as usize);
    for pi in 0..np {
        for pj in 0..np {
            let typ = typology_ids[pattern(pi, pj) % typology_ids.len()];
            patch_typology.push(typ);
            let profile = TYPOLOGIES[typ];
            let mut rng = rng_for(seed, (pi * 10_000 + pj) as u64, typ as u64);
            let x0 = -half_m + pi as f64 * patch_m;
            let y0 = -half_m + pj as f64 * patch_m;
            let mut place = |count: usize, tags: &[(&str, &str)], rng: &mut ChaCha8Rng| {
                for _ in 0..count {
                    let x = x0 + rng.gen::<f64>() * patch_m;
                    let y = y0 + rng.gen::<f64>() * patch_m;
                    let (lat, lon) = frame.unproject(x, y);
                    let mut map = TagMap::new();
                    for (k, v) in tags {
                        map.insert(k.to_string(), v.to_string());
                    }
                    entities.push(Entity::node(next_id, map, lat, lon).unwrap());
                    next_id += 1;
                }
            };
            let s = density_scale;
            place(
                profile.restaurants * s,
                &[("amenity", "restaurant")],
                &mut rng,
            );
            place(profile.natural * s, &[("natural", "tree")], &mut rng);
            place(
                profile.residential * s,
                &[("building", "residential")],
                &mut rng,
            );
            place(profile.parking * s, &[("amenity", "parking")], &mut rng);
        }
    }
    SynthCity {
        entities: EntitySet::new(entities, format!("synthetic:{name}")).unwrap(),
        boundary,
        half_m,
        patch_m,
        patch_typology,
        patches_per_side: np as usize,
    }
}

/// [`synth_city_scaled`] with unit density.
pub fn synth_city(
    seed: u64,
    name: &str,
    center: (f64, f64),
    half_m: f64,
    patch_m: f64,
    typology_ids: &[usize],
    pattern: impl Fn(i64, i64) -> usize,
) -> SynthCity {
    synth_city_scaled(
        seed,
        name,
        center,
        half_m,
        patch_m,
        typology_ids,
        1,
        pattern,
    )
}
