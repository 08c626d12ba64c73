//! Offline name databases: SSA yearly baby-name files, an aggregated census
//! CSV, and a nam_dict-compatible fixed-width dictionary with per-country
//! frequency ranks.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::country::CountryCode;
use crate::normalize::{normalize_key, NameKey};
use crate::types::{BackendId, CoreError, GenderLabel, Prediction};

#[derive(Debug, Error)]
pub enum DbError {
    #[error("{}:{line}:{column}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: no name records found", .0.display())]
    Empty(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Contract(#[from] CoreError),
}

fn parse_err(file: &Path, line: usize, column: usize, message: impl Into<String>) -> DbError {
    DbError::Parse {
        file: file.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DbError + '_ {
    move |source| DbError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountRecord {
    pub male_count: u64,
    pub female_count: u64,
}

impl CountRecord {
    pub fn total(&self) -> u64 {
        self.male_count + self.female_count
    }
}

/// Gender code of a dictionary entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DictCode {
    /// `M`
    Male,
    /// `1M`: male when used as the first part of a name.
    MaleFirstPart,
    /// `?M`
    MostlyMale,
    /// `F`
    Female,
    /// `1F`
    FemaleFirstPart,
    /// `?F`
    MostlyFemale,
    /// `?`: unisex.
    Unisex,
}

impl DictCode {
    fn parse(code: &str) -> Option<DictCode> {
        Some(match code {
            "M" => DictCode::Male,
            "1M" => DictCode::MaleFirstPart,
            "?M" => DictCode::MostlyMale,
            "F" => DictCode::Female,
            "1F" => DictCode::FemaleFirstPart,
            "?F" => DictCode::MostlyFemale,
            "?" => DictCode::Unisex,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DictCode::Male => "M",
            DictCode::MaleFirstPart => "1M",
            DictCode::MostlyMale => "?M",
            DictCode::Female => "F",
            DictCode::FemaleFirstPart => "1F",
            DictCode::MostlyFemale => "?F",
            DictCode::Unisex => "?",
        }
    }

    pub fn raw_label(&self) -> GenderLabel {
        match self {
            DictCode::Male | DictCode::MaleFirstPart => GenderLabel::Male,
            DictCode::MostlyMale => GenderLabel::MostlyMale,
            DictCode::Female | DictCode::FemaleFirstPart => GenderLabel::Female,
            DictCode::MostlyFemale => GenderLabel::MostlyFemale,
            DictCode::Unisex => GenderLabel::Unknown,
        }
    }

    /// Signed score; the "mostly" codes are collapsed to half confidence.
    pub fn score(&self) -> f64 {
        match self {
            DictCode::Male | DictCode::MaleFirstPart => 1.0,
            DictCode::MostlyMale => 0.5,
            DictCode::Female | DictCode::FemaleFirstPart => -1.0,
            DictCode::MostlyFemale => -0.5,
            DictCode::Unisex => 0.0,
        }
    }
}

/// One frequency column of the dictionary file.
#[derive(Debug, Clone, Copy)]
pub struct DictColumn {
    /// Map key for the column: an ISO code, or a label for regions without one.
    pub key: &'static str,
    /// Countries served by this column.
    pub countries: &'static [&'static str],
}

/// Frequency columns in file order, starting at column 31.
pub const DICT_COLUMNS: [DictColumn; 55] = {
    const fn c(key: &'static str, countries: &'static [&'static str]) -> DictColumn {
        DictColumn { key, countries }
    }
    [
        c("GB", &["GB"]),
        c("IE", &["IE"]),
        c("US", &["US"]),
        c("IT", &["IT"]),
        c("MT", &["MT"]),
        c("PT", &["PT"]),
        c("ES", &["ES"]),
        c("FR", &["FR"]),
        c("BE", &["BE"]),
        c("LU", &["LU"]),
        c("NL", &["NL"]),
        c("east_frisia", &[]),
        c("DE", &["DE"]),
        c("AT", &["AT"]),
        c("CH", &["CH"]),
        c("IS", &["IS"]),
        c("DK", &["DK"]),
        c("NO", &["NO"]),
        c("SE", &["SE"]),
        c("FI", &["FI"]),
        c("EE", &["EE"]),
        c("LV", &["LV"]),
        c("LT", &["LT"]),
        c("PL", &["PL"]),
        c("CZ", &["CZ"]),
        c("SK", &["SK"]),
        c("HU", &["HU"]),
        c("RO", &["RO"]),
        c("BG", &["BG"]),
        c("BA", &["BA"]),
        c("HR", &["HR"]),
        c("XK", &["XK"]),
        c("MK", &["MK"]),
        c("ME", &["ME"]),
        c("RS", &["RS"]),
        c("SI", &["SI"]),
        c("AL", &["AL"]),
        c("GR", &["GR"]),
        c("RU", &["RU"]),
        c("BY", &["BY"]),
        c("MD", &["MD"]),
        c("UA", &["UA"]),
        c("AM", &["AM"]),
        c("AZ", &["AZ"]),
        c("GE", &["GE"]),
        c("KZ", &["KZ", "UZ", "KG", "TJ", "TM"]),
        c("TR", &["TR"]),
        c("SA", &["SA", "IR", "AE", "IQ", "JO", "KW", "LB", "OM", "QA", "SY", "YE", "BH", "EG"]),
        c("IL", &["IL"]),
        c("CN", &["CN", "TW", "HK"]),
        c("IN", &["IN", "LK"]),
        c("JP", &["JP"]),
        c("KR", &["KR", "KP"]),
        c("VN", &["VN"]),
        c("other", &[]),
    ]
};

const NAME_FIELD: std::ops::Range<usize> = 3..29;
const FREQ_START: usize = 30;

fn column_for(country: CountryCode) -> Option<usize> {
    DICT_COLUMNS
        .iter()
        .position(|col| col.countries.contains(&country.as_str()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictEntry {
    pub name_key: String,
    pub code: DictCode,
    freqs: [u8; 55],
}

impl DictEntry {
    pub fn new(name_key: impl Into<String>, code: DictCode, freqs: [u8; 55]) -> DictEntry {
        DictEntry {
            name_key: name_key.into(),
            code,
            freqs,
        }
    }

    /// Frequency rank 1..=13 in the given country, 0 when absent.
    pub fn frequency_in(&self, country: CountryCode) -> u8 {
        column_for(country).map_or(0, |i| self.freqs[i])
    }

    pub fn global_frequency(&self) -> u32 {
        self.freqs.iter().map(|&f| u32::from(f)).sum()
    }

    /// Nonzero frequencies keyed by column key.
    pub fn country_freq(&self) -> BTreeMap<&'static str, u8> {
        DICT_COLUMNS
            .iter()
            .zip(self.freqs.iter())
            .filter(|(_, &f)| f > 0)
            .map(|(col, &f)| (col.key, f))
            .collect()
    }

    pub fn frequencies(&self) -> &[u8; 55] {
        &self.freqs
    }
}

#[derive(Debug, Clone)]
enum Index {
    Counts(HashMap<String, CountRecord>),
    Dict(HashMap<String, Vec<DictEntry>>),
}

/// Immutable name index for one offline backend.
#[derive(Debug, Clone)]
pub struct NameDatabase {
    backend: BackendId,
    index: Index,
}

impl NameDatabase {
    pub fn backend(&self) -> BackendId {
        self.backend
    }

    pub fn len(&self) -> usize {
        match &self.index {
            Index::Counts(m) => m.len(),
            Index::Dict(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self, key: &str) -> Option<CountRecord> {
        match &self.index {
            Index::Counts(m) => m.get(key).copied(),
            Index::Dict(_) => None,
        }
    }

    pub fn dict_entries(&self, key: &str) -> Option<&[DictEntry]> {
        match &self.index {
            Index::Dict(m) => m.get(key).map(Vec::as_slice),
            Index::Counts(_) => None,
        }
    }

    pub fn count_index(&self) -> Option<&HashMap<String, CountRecord>> {
        match &self.index {
            Index::Counts(m) => Some(m),
            Index::Dict(_) => None,
        }
    }

    pub fn dict_index(&self) -> Option<&HashMap<String, Vec<DictEntry>>> {
        match &self.index {
            Index::Dict(m) => Some(m),
            Index::Counts(_) => None,
        }
    }

    /// Builds a count-backed database directly. Zero-total records are dropped.
    pub fn from_counts(
        backend: BackendId,
        counts: HashMap<String, CountRecord>,
    ) -> Result<NameDatabase, CoreError> {
        if !matches!(backend, BackendId::Ssa | BackendId::Census) {
            return Err(CoreError::ContractViolation(format!(
                "{backend} is not a count-backed database"
            )));
        }
        let counts = counts.into_iter().filter(|(_, r)| r.total() > 0).collect();
        Ok(NameDatabase {
            backend,
            index: Index::Counts(counts),
        })
    }
}

fn add_count(index: &mut HashMap<String, CountRecord>, key: String, male: u64, female: u64) {
    let rec = index.entry(key).or_default();
    rec.male_count += male;
    rec.female_count += female;
}

fn is_year_file(name: &str) -> bool {
    name.len() == 11
        && name.starts_with("yob")
        && name.ends_with(".txt")
        && name[3..7].bytes().all(|b| b.is_ascii_digit())
}

/// Reads every `yobYYYY.txt` in `dir`, summing counts per name and sex across years.
pub fn parse_ssa_dir(dir: &Path) -> Result<NameDatabase, DbError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_str().is_some_and(is_year_file))
        .map(|e| e.path())
        .collect();
    files.sort();

    let mut index = HashMap::new();
    for file in &files {
        let text = fs::read_to_string(file).map_err(io_err(file))?;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(parse_err(
                    file,
                    line_no,
                    1,
                    format!("expected `Name,Sex,Count`, found {} field(s)", fields.len()),
                ));
            }
            let sex_col = fields[0].chars().count() + 2;
            let count_col = sex_col + fields[1].chars().count() + 1;
            let key = normalize_key(fields[0])
                .map_err(|_| parse_err(file, line_no, 1, "empty name"))?;
            let count: u64 = fields[2].trim().parse().map_err(|_| {
                parse_err(file, line_no, count_col, format!("invalid count {:?}", fields[2]))
            })?;
            match fields[1].trim() {
                "M" => add_count(&mut index, key, count, 0),
                "F" => add_count(&mut index, key, 0, count),
                other => {
                    return Err(parse_err(
                        file,
                        line_no,
                        sex_col,
                        format!("sex must be M or F, found {other:?}"),
                    ))
                }
            }
        }
    }
    index.retain(|_, r: &mut CountRecord| r.total() > 0);
    if index.is_empty() {
        return Err(DbError::Empty(dir.to_path_buf()));
    }
    Ok(NameDatabase {
        backend: BackendId::Ssa,
        index: Index::Counts(index),
    })
}

/// Reads an aggregated census CSV with header `name,male_count,female_count`.
pub fn parse_census_csv(path: &Path) -> Result<NameDatabase, DbError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, 1, e.to_string()))?
        .clone();
    let expected = ["name", "male_count", "female_count"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(parse_err(
            path,
            1,
            1,
            "missing header `name,male_count,female_count`",
        ));
    }

    let mut index = HashMap::new();
    let mut rows = 0usize;
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows += 1;
        let key = normalize_key(&record[0]).map_err(|_| parse_err(path, line, 1, "empty name"))?;
        let mut counts = [0u64; 2];
        for (slot, field) in counts.iter_mut().zip(1..3) {
            *slot = record[field].parse().map_err(|_| {
                parse_err(
                    path,
                    line,
                    field + 1,
                    format!("{} is not a non-negative integer: {:?}", expected[field], &record[field]),
                )
            })?;
        }
        add_count(&mut index, key, counts[0], counts[1]);
    }
    index.retain(|_, r: &mut CountRecord| r.total() > 0);
    if rows == 0 || index.is_empty() {
        return Err(DbError::Empty(path.to_path_buf()));
    }
    Ok(NameDatabase {
        backend: BackendId::Census,
        index: Index::Counts(index),
    })
}

fn dict_name_key(field: &str) -> Option<String> {
    let joined = field
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("-")
        .replace('+', "-");
    normalize_key(&joined).ok()
}

fn freq_rank(c: char) -> Option<u8> {
    match c {
        ' ' => Some(0),
        '1'..='9' => Some(c as u8 - b'0'),
        'A'..='D' => Some(c as u8 - b'A' + 10),
        'a'..='d' => Some(c as u8 - b'a' + 10),
        _ => None,
    }
}

/// Parses a nam_dict-compatible dictionary.
///
/// Columns are counted in characters, 1-based: gender code in 1-2, name in
/// 4-29, frequency ranks for [`DICT_COLUMNS`] in 31-85. Text after column 85
/// is ignored. `+` inside a name reads as a hyphen.
pub fn parse_dict_file(path: &Path) -> Result<NameDatabase, DbError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_dict_str(&text, path)
}

pub fn parse_dict_str(text: &str, path: &Path) -> Result<NameDatabase, DbError> {
    let mut index: HashMap<String, Vec<DictEntry>> = HashMap::new();
    let mut aliases: Vec<(usize, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let chars: Vec<char> = line.chars().collect();
        let at = |i: usize| chars.get(i).copied().unwrap_or(' ');
        let code: String = chars.iter().take(2).collect::<String>().trim().to_string();
        if at(2) != ' ' {
            return Err(parse_err(path, line_no, 3, "expected a space after the gender code"));
        }

        if code == "=" {
            let rest: String = chars.iter().skip(3).collect();
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(parse_err(
                    path,
                    line_no,
                    4,
                    "equivalence line needs exactly `alias name`",
                ));
            }
            let alias = dict_name_key(parts[0])
                .ok_or_else(|| parse_err(path, line_no, 4, "empty alias"))?;
            let target = dict_name_key(parts[1])
                .ok_or_else(|| parse_err(path, line_no, 4, "empty equivalence target"))?;
            aliases.push((line_no, alias, target));
            continue;
        }

        let code = DictCode::parse(&code).ok_or_else(|| {
            parse_err(path, line_no, 1, format!("unknown gender code {code:?}"))
        })?;
        if at(NAME_FIELD.end) != ' ' {
            return Err(parse_err(
                path,
                line_no,
                NAME_FIELD.end + 1,
                "name field longer than 26 characters",
            ));
        }
        let name: String = (NAME_FIELD).map(at).collect();
        let key = dict_name_key(&name)
            .ok_or_else(|| parse_err(path, line_no, NAME_FIELD.start + 1, "empty name field"))?;

        let mut freqs = [0u8; 55];
        for (col, slot) in freqs.iter_mut().enumerate() {
            let pos = FREQ_START + col;
            let c = at(pos);
            *slot = freq_rank(c).ok_or_else(|| {
                parse_err(
                    path,
                    line_no,
                    pos + 1,
                    format!("frequency must be a hex digit 1-D or space, found {c:?}"),
                )
            })?;
        }
        index
            .entry(key.clone())
            .or_default()
            .push(DictEntry::new(key, code, freqs));
    }

    for (line_no, alias, target) in aliases {
        match index.get(&target).cloned() {
            Some(entries) => {
                let folded: Vec<DictEntry> = entries
                    .into_iter()
                    .map(|e| DictEntry {
                        name_key: alias.clone(),
                        ..e
                    })
                    .collect();
                index.entry(alias).or_default().extend(folded);
            }
            None => log::warn!(
                "{}:{line_no}: equivalence target {target:?} has no entries; ignored",
                path.display()
            ),
        }
    }

    if index.is_empty() {
        return Err(DbError::Empty(path.to_path_buf()));
    }
    Ok(NameDatabase {
        backend: BackendId::Dict,
        index: Index::Dict(index),
    })
}

/// Count-based decision: `p_male = male / (male + female)`, abstain when unseen.
pub fn lookup_counts(db: &NameDatabase, key: &NameKey) -> Result<Prediction, CoreError> {
    let Index::Counts(index) = &db.index else {
        return Err(CoreError::ContractViolation(format!(
            "lookup_counts on {} database",
            db.backend
        )));
    };
    let Some(rec) = key.candidates().find_map(|k| index.get(k)) else {
        return Ok(Prediction::abstain(db.backend));
    };
    let p_male = rec.male_count as f64 / rec.total() as f64;
    Prediction::from_probability(p_male, db.backend)
}

/// Picks the unique maximum by `rank`; ties among entries that disagree give `None`.
fn unique_best<'a>(
    entries: &[&'a DictEntry],
    rank: impl Fn(&DictEntry) -> u32,
) -> Option<Option<&'a DictEntry>> {
    let best = entries.iter().map(|e| rank(e)).max()?;
    if best == 0 {
        return None;
    }
    let top: Vec<&DictEntry> = entries.iter().copied().filter(|e| rank(e) == best).collect();
    let first = top[0];
    if top.iter().all(|e| e.code.score() == first.code.score()) {
        Some(Some(first))
    } else {
        Some(None)
    }
}

/// Dictionary decision with country disambiguation.
///
/// With a country, the entry most frequent in that country wins. Without one,
/// or when no entry has a nonzero rank there, the entry with the highest sum
/// of ranks over all columns wins. A tie between disagreeing entries abstains.
pub fn lookup_dict(
    db: &NameDatabase,
    key: &NameKey,
    country: Option<CountryCode>,
) -> Result<Prediction, CoreError> {
    let Index::Dict(index) = &db.index else {
        return Err(CoreError::ContractViolation(format!(
            "lookup_dict on {} database",
            db.backend
        )));
    };
    let Some(entries) = key.candidates().find_map(|k| index.get(k)) else {
        return Ok(Prediction::abstain(BackendId::Dict));
    };
    let entries: Vec<&DictEntry> = entries.iter().collect();

    let by_country = country.and_then(|c| unique_best(&entries, |e| u32::from(e.frequency_in(c))));
    let winner = match by_country {
        Some(decided) => decided,
        None => match unique_best(&entries, DictEntry::global_frequency) {
            Some(decided) => decided,
            // every entry has empty frequency data
            None if entries.len() == 1 => Some(entries[0]),
            None => unique_best(&entries, |_| 1).flatten(),
        },
    };
    match winner {
        Some(entry) => Prediction::new(entry.code.score(), BackendId::Dict),
        None => Ok(Prediction::abstain(BackendId::Dict)),
    }
}
