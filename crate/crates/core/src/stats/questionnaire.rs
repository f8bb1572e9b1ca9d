//! Acceptance questionnaire ingestion and the per-condition report.
//!
//! Responses are a CSV with columns `participant_id, condition, item_1 ..
//! item_9`, where `condition` is `hud` or `nohud`. A sidecar JSON object maps
//! `item_N` to a reverse flag; reversed items are negated on ingestion so the
//! scoring kernel only ever sees +2 as the positive pole.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::Deserialize;

use super::{
    mean_sd, paired_t_test, van_der_laan, Alternative, PairedSamples, StatsError, TTestResult, VanDerLaanResponse,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Hud,
    NoHud,
}

impl Condition {
    pub fn parse(s: &str) -> Option<Condition> {
        match s.trim() {
            "hud" => Some(Condition::Hud),
            "nohud" => Some(Condition::NoHud),
            _ => None,
        }
    }
}

/// Which of the nine items are reverse-scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ItemOrientation {
    reverse: [bool; 9],
}

impl ItemOrientation {
    /// Parse `{"item_1": false, "item_2": true, ...}`. Missing items are not
    /// reversed; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self, StatsError> {
        let map: HashMap<String, bool> =
            serde_json::from_str(text).map_err(|e| StatsError::Input(format!("item orientation: {e}")))?;
        let mut reverse = [false; 9];
        for (key, flag) in map {
            let idx = item_index(&key).ok_or_else(|| StatsError::Input(format!("unknown item key `{key}`")))?;
            reverse[idx] = flag;
        }
        Ok(ItemOrientation { reverse })
    }

    pub fn orient(&self, raw: &[i32]) -> Vec<i32> {
        raw.iter()
            .zip(self.reverse)
            .map(|(&v, rev)| if rev { -v } else { v })
            .collect()
    }
}

fn item_index(key: &str) -> Option<usize> {
    let n: usize = key.strip_prefix("item_")?.parse().ok()?;
    (1..=9).contains(&n).then(|| n - 1)
}

#[derive(Debug, Deserialize)]
struct Row {
    participant_id: String,
    condition: String,
    item_1: i32,
    item_2: i32,
    item_3: i32,
    item_4: i32,
    item_5: i32,
    item_6: i32,
    item_7: i32,
    item_8: i32,
    item_9: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseRecord {
    pub participant_id: String,
    pub condition: Condition,
    pub response: VanDerLaanResponse,
}

pub fn read_responses<R: Read>(reader: R, orientation: &ItemOrientation) -> Result<Vec<ResponseRecord>, StatsError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (line, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| StatsError::Input(format!("responses row {}: {e}", line + 1)))?;
        let condition = Condition::parse(&row.condition)
            .ok_or_else(|| StatsError::Input(format!("row {}: unknown condition `{}`", line + 1, row.condition)))?;
        let raw = [
            row.item_1, row.item_2, row.item_3, row.item_4, row.item_5, row.item_6, row.item_7, row.item_8, row.item_9,
        ];
        let response = VanDerLaanResponse::new(&orientation.orient(&raw))?;
        out.push(ResponseRecord {
            participant_id: row.participant_id,
            condition,
            response,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Usefulness,
    Satisfaction,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Usefulness => "usefulness",
            Scale::Satisfaction => "satisfaction",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSummary {
    pub scale: Scale,
    pub n: usize,
    pub hud_mean: f64,
    pub hud_sd: f64,
    pub nohud_mean: f64,
    pub nohud_sd: f64,
    /// Two-sided paired test of hud against nohud.
    pub test: TTestResult,
}

/// Pair each participant's hud and nohud responses and summarize both scales.
pub fn summarize(records: &[ResponseRecord]) -> Result<Vec<ScaleSummary>, StatsError> {
    let mut by_participant: BTreeMap<&str, BTreeMap<Condition, &VanDerLaanResponse>> = BTreeMap::new();
    for r in records {
        let slot = by_participant.entry(&r.participant_id).or_default();
        if slot.insert(r.condition, &r.response).is_some() {
            return Err(StatsError::Input(format!(
                "participant `{}` has two responses for one condition",
                r.participant_id
            )));
        }
    }
    let mut pairs = Vec::new();
    for (id, conds) in &by_participant {
        match (conds.get(&Condition::Hud), conds.get(&Condition::NoHud)) {
            (Some(h), Some(n)) => pairs.push((van_der_laan(h), van_der_laan(n))),
            _ => {
                return Err(StatsError::Input(format!(
                    "participant `{id}` lacks a hud or nohud response"
                )));
            }
        }
    }

    [Scale::Usefulness, Scale::Satisfaction]
        .into_iter()
        .map(|scale| {
            let pick = |s: &super::AcceptanceScores| match scale {
                Scale::Usefulness => s.usefulness,
                Scale::Satisfaction => s.satisfaction,
            };
            let hud: Vec<f64> = pairs.iter().map(|(h, _)| pick(h)).collect();
            let nohud: Vec<f64> = pairs.iter().map(|(_, n)| pick(n)).collect();
            let (hud_mean, hud_sd) = mean_sd(&hud)?;
            let (nohud_mean, nohud_sd) = mean_sd(&nohud)?;
            let test = paired_t_test(&PairedSamples::new(hud, nohud)?, Alternative::TwoSided)?;
            Ok(ScaleSummary {
                scale,
                n: pairs.len(),
                hud_mean,
                hud_sd,
                nohud_mean,
                nohud_sd,
                test,
            })
        })
        .collect()
}

pub fn write_report<W: Write>(writer: W, summaries: &[ScaleSummary]) -> Result<(), StatsError> {
    let io = |e: csv::Error| StatsError::Input(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "scale",
        "n",
        "hud_mean",
        "hud_sd",
        "nohud_mean",
        "nohud_sd",
        "t",
        "df",
        "p",
    ])
    .map_err(io)?;
    for s in summaries {
        w.write_record([
            s.scale.name().to_string(),
            s.n.to_string(),
            s.hud_mean.to_string(),
            s.hud_sd.to_string(),
            s.nohud_mean.to_string(),
            s.nohud_sd.to_string(),
            s.test.t.to_string(),
            s.test.df.to_string(),
            s.test.p.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| StatsError::Input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "participant_id,condition,item_1,item_2,item_3,item_4,item_5,item_6,item_7,item_8,item_9
p1,hud,2,2,2,2,2,2,2,2,2
p1,nohud,1,-2,1,1,1,1,1,1,1
p2,hud,1,1,1,1,1,1,1,1,1
p2,nohud,0,0,0,0,0,0,0,0,0
p3,hud,2,1,2,1,2,1,2,1,2
p3,nohud,2,1,2,1,2,1,2,1,0
";

    #[test]
    fn reverse_flags_negate_items() {
        let o = ItemOrientation::from_json(r#"{"item_2": true, "item_4": false}"#).unwrap();
        let recs = read_responses(CSV.as_bytes(), &o).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(recs[1].response.items()[1], 2);
        assert_eq!(recs[0].response.items()[1], -2);
        assert!(ItemOrientation::from_json(r#"{"item_10": true}"#).is_err());
    }

    #[test]
    fn summary_pairs_conditions() {
        let recs = read_responses(CSV.as_bytes(), &ItemOrientation::default()).unwrap();
        let s = summarize(&recs).unwrap();
        assert_eq!(s.len(), 2);
        let u = &s[0];
        assert_eq!(u.n, 3);
        // usefulness hud: [2, 1, 2]; nohud: [1, 0, 1.6]
        assert!((u.hud_mean - 5.0 / 3.0).abs() < 1e-12);
        assert!((u.nohud_mean - 2.6 / 3.0).abs() < 1e-12);
        assert_eq!(u.test.df, 2);
        let mut buf = Vec::new();
        write_report(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("scale,n,hud_mean,hud_sd,nohud_mean,nohud_sd,t,df,p\nusefulness,3,"));
    }

    #[test]
    fn rejects_bad_rows() {
        let bad_cond = "participant_id,condition,item_1,item_2,item_3,item_4,item_5,item_6,item_7,item_8,item_9\np1,maybe,0,0,0,0,0,0,0,0,0\n";
        assert!(read_responses(bad_cond.as_bytes(), &ItemOrientation::default()).is_err());
        let bad_item = "participant_id,condition,item_1,item_2,item_3,item_4,item_5,item_6,item_7,item_8,item_9\np1,hud,0,0,0,0,0,5,0,0,0\n";
        assert!(matches!(
            read_responses(bad_item.as_bytes(), &ItemOrientation::default()),
            Err(StatsError::ItemOutOfRange { index: 6, value: 5 })
        ));
        let unpaired = "participant_id,condition,item_1,item_2,item_3,item_4,item_5,item_6,item_7,item_8,item_9\np1,hud,0,0,0,0,0,0,0,0,0\np2,nohud,0,0,0,0,0,0,0,0,0\n";
        let recs = read_responses(unpaired.as_bytes(), &ItemOrientation::default()).unwrap();
        assert!(summarize(&recs).is_err());
    }
}
