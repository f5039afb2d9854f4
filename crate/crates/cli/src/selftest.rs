//! Built-in example jobs for `--selftest`.

use anyhow::bail;
use hypam::line::classify_line;
use hypam::{C64, CP1Point, FloorDiagram, HPoint, Line, LineAmoebaClass, ProjPoint, RationalCurve, Surface};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::dispatch;
use crate::job::{Job, Outcome};

type Check = fn(&Outcome) -> bool;

pub struct Case {
    pub name: &'static str,
    pub job: Job,
    pub check: Check,
}

fn real(m: [f64; 4]) -> anyhow::Result<ProjPoint> {
    Ok(ProjPoint::from_real(m)?)
}

fn job(input: Value) -> Job {
    Job { seed: Some(1), input, ..Default::default() }
}

fn get<'a>(o: &'a Outcome, key: &str) -> &'a Value {
    o.result.get(key).unwrap_or(&Value::Null)
}

fn l2() -> anyhow::Result<Line> {
    Ok(Line::through(&real([1.0, 0.0, 0.0, 0.0])?, &real([0.0, 0.0, 0.0, 1.0])?)?)
}

fn cylinder_pencil() -> [[C64; 4]; 2] {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    [[o, o, z, z], [z, z, z, o]]
}

pub fn cases(command: &str) -> anyhow::Result<Vec<Case>> {
    let l1 = Line::through(&real([1.0, 0.0, 0.0, 1.0])?, &real([0.0, 1.0, 0.0, 0.0])?)?;
    let cubic = RationalCurve::from_real([
        vec![0.0, 0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ])?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = match command {
        "line-classify" => vec![
            Case {
                name: "l2 is the geodesic 0-inf",
                job: job(json!({ "line": l2()? })),
                check: |o| {
                    let mut e: Vec<&str> = get(o, "endpoints").as_array().map_or(vec![], |a| a.iter().filter_map(|v| v.as_str()).collect());
                    e.sort();
                    get(o, "class") == "geodesic" && e == ["0", "inf"] && o.passed()
                },
            },
            Case {
                name: "l1 is a horosphere at inf",
                job: job(json!({ "line": l1 })),
                check: |o| get(o, "class") == "horosphere" && get(o, "center") == "inf" && o.passed(),
            },
        ],
        "line-sample" => vec![Case {
            name: "l2 samples lie on the axis",
            job: Job { count: Some(64), ..job(json!({ "line": l2()? })) },
            check: |o| get(o, "points") == 64 && o.passed(),
        }],
        "curve-gauss" => vec![
            Case {
                name: "line has constant Gauss map",
                job: job(json!({ "curve": RationalCurve::from_line(&l2()?), "params": [CP1Point::from_affine(C64::new(0.5, 0.2))] })),
                check: |o| get(o, "gauss_degree") == 0 && get(o, "roots")[0].as_array().is_some_and(|r| r.len() == 2),
            },
            Case {
                name: "twisted cubic has Gauss degree 4",
                job: job(json!({ "curve": cubic, "side": "plus" })),
                check: |o| get(o, "gauss_degree") == 4,
            },
        ],
        "curve-critical" => vec![Case {
            name: "l2 is critical everywhere",
            job: job(json!({ "curve": RationalCurve::from_line(&l2()?), "grid": 64 })),
            check: |o| get(o, "critical_count") == 64,
        }],
        "surface-member" => vec![
            Case {
                name: "origin is in the hole",
                job: job(json!({ "surface": Surface::hole_quadric(), "point": HPoint::origin() })),
                check: |o| get(o, "member") == false,
            },
            Case {
                name: "planes fill space",
                job: job(json!({ "surface": Surface::random(1, &mut rng)?, "point": HPoint::origin() })),
                check: |o| get(o, "member") == true,
            },
        ],
        "surface-convexity" => vec![Case {
            name: "hole is convex",
            job: job(json!({ "surface": Surface::hole_quadric(), "pairs": 5, "steps": 10 })),
            check: |o| get(o, "violations") == 0 && o.passed(),
        }],
        "surface-fill" => vec![Case {
            name: "cubic amoeba is everything",
            job: Job { count: Some(10), ..job(json!({ "surface": Surface::random(3, &mut rng)? })) },
            check: |o| o.passed(),
        }],
        "surface-gauss" => vec![Case {
            name: "Borel plane is not critical",
            job: job(json!({
                "surface": Surface::linear([0.0, 0.0, 1.0, 0.0].map(|x| C64::new(x, 0.0)))?,
                "point": ProjPoint::new([C64::new(1.0, 0.5), C64::new(-0.3, 1.0), C64::new(0.0, 0.0), C64::new(2.0, -1.0)])?,
            })),
            check: |o| get(o, "gauss_critical") == false && o.passed(),
        }],
        "trop-validate" => {
            let mut bad = FloorDiagram::figure1();
            bad.degree += 1;
            vec![
                Case {
                    name: "figure diagram is valid",
                    job: job(json!({ "diagram": FloorDiagram::figure1() })),
                    check: |o| o.passed(),
                },
                Case {
                    name: "wrong degree is rejected",
                    job: job(json!({ "diagram": bad })),
                    check: |o| !o.passed() && get(o, "violations").as_array().is_some_and(|v| !v.is_empty()),
                },
            ]
        }
        "trop-theta" => vec![Case {
            name: "samples sit on their pieces",
            job: Job { density: Some(2000), ..job(json!({ "diagram": FloorDiagram::figure1() })) },
            check: |o| o.residuals.get("max_piece_distance").is_some_and(|d| *d < 1e-9),
        }],
        "trop-converge" => {
            let [r1, r2] = cylinder_pencil();
            let LineAmoebaClass::Cylinder { axis, .. } = classify_line(&Line::through(&ProjPoint::new(r1)?, &ProjPoint::new(r2)?)?)?
            else {
                bail!("reference pencil is not a cylinder");
            };
            vec![Case {
                name: "cylinder pencil converges",
                job: job(json!({
                    "diagram": FloorDiagram::constant_line([axis.0, axis.1]),
                    "pencil": [ProjPoint::new(r1)?, ProjPoint::new(r2)?],
                    "log_t": [10.0, 20.0, 30.0, 40.0, 50.0],
                })),
                check: |o| o.passed() && get(o, "monotone") == true,
            }]
        }
        "export" => {
            let path = std::env::temp_dir().join(format!("hypam-selftest-{}.csv", std::process::id()));
            vec![Case {
                name: "points export",
                job: Job { artifact: Some(path), ..job(json!({ "points": [[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]], "pieces": [0, 1] })) },
                check: |o| get(o, "points") == 2,
            }]
        }
        _ => bail!("unknown command {command}"),
    };
    Ok(cases)
}

/// Runs every case for `command`; returns `(name, passed, error)` per case.
pub fn run(command: &str) -> anyhow::Result<Vec<(String, bool, Option<String>)>> {
    let mut out = Vec::new();
    for case in cases(command)? {
        let res = dispatch(command, &case.job);
        if let Some(p) = &case.job.artifact {
            let _ = std::fs::remove_file(p);
        }
        out.push(match res {
            Ok(o) => (case.name.to_string(), (case.check)(&o), None),
            Err(e) => (case.name.to_string(), false, Some(format!("{e:#}"))),
        });
    }
    Ok(out)
}
