//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use bernoulli_core::geometry::{BBox, ConvexPolygon, Point, Polygon};

/// A configuration problem, located by line (when it came from a file) and key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key '{key}': ")?;
        }
        f.write_str(&self.message)
    }
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { line: None, key: None, message: message.into() }
    }
}

/// Every key the drivers understand.
pub const KNOWN_KEYS: &[&str] = &[
    "inner",
    "outer",
    "omega",
    "omega1",
    "initial",
    "p",
    "h",
    "grid_bbox",
    "grid_pad",
    "level",
    "lambda",
    "bernoulli_omega",
    "steps",
    "t_grid",
    "joining",
    "radius",
    "dimension",
    "samples",
    "outer_tol",
    "outer_max",
    "picard_tol",
    "picard_max",
    "eps_reg",
    "convexify",
    "out",
];

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    value: String,
    line: Option<usize>,
}

/// Parsed key/value pairs. Later assignments (including CLI overrides) replace earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<String, Entry>,
    /// Directory relative paths in the file are resolved against.
    base: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |message: String, key: Option<String>| ConfigError { line: Some(n + 1), key, message };
            let (k, v) = line.split_once('=').ok_or_else(|| at("expected key = value".into(), None))?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(at("unknown key".into(), Some(k.into())));
            }
            if v.is_empty() {
                return Err(at("empty value".into(), Some(k.into())));
            }
            cfg.entries.insert(k.into(), Entry { value: v.into(), line: Some(n + 1) });
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Command-line override.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError { line: None, key: Some(key.into()), message: "unknown key".into() });
        }
        self.entries.insert(key.into(), Entry { value: value.into(), line: None });
        Ok(())
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.entries.get(key).and_then(|e| e.line),
            key: Some(key.into()),
            message: message.into(),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.raw(key).ok_or_else(|| self.err(key, "missing required key"))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key)
            .map(|v| parse_number(v).ok_or_else(|| self.err(key, format!("not a number: {v:?}"))))
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn f64_req(&self, key: &str) -> Result<f64, ConfigError> {
        self.require(key)?;
        Ok(self.f64_opt(key)?.unwrap_or(f64::NAN))
    }

    /// Number in `[lo, hi]`.
    pub fn f64_in(&self, key: &str, default: Option<f64>, lo: f64, hi: f64) -> Result<f64, ConfigError> {
        let v = match default {
            Some(d) => self.f64_or(key, d)?,
            None => self.f64_req(key)?,
        };
        if !(v >= lo && v <= hi) {
            return Err(self.err(key, format!("{v} is outside [{lo}, {hi}]")));
        }
        Ok(v)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.err(key, format!("not a non-negative integer: {v:?}"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "on" | "1") => Ok(true),
            Some("false" | "no" | "off" | "0") => Ok(false),
            Some(v) => Err(self.err(key, format!("not a boolean: {v:?}"))),
        }
    }

    pub fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| parse_number(s.trim()).ok_or_else(|| self.err(key, format!("not a number: {:?}", s.trim()))))
                    .collect()
            })
            .transpose()
    }

    pub fn path_or(&self, key: &str, default: &str) -> PathBuf {
        self.resolve(self.raw(key).unwrap_or(default))
    }

    fn resolve(&self, v: &str) -> PathBuf {
        let p = PathBuf::from(v);
        match &self.base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        }
    }

    /// A body given as `disk:cx,cy,r[,n]`, `square:cx,cy,side`, or a polygon file path.
    pub fn shape(&self, key: &str) -> Result<Polygon, ConfigError> {
        let v = self.require(key)?;
        if let Some((kind, args)) = v.split_once(':').filter(|(k, _)| matches!(*k, "disk" | "square")) {
            let nums: Vec<f64> = args
                .split(',')
                .map(|s| parse_number(s.trim()).ok_or_else(|| self.err(key, format!("bad shape argument {s:?}"))))
                .collect::<Result<_, _>>()?;
            let shape = match (kind, nums.as_slice()) {
                ("disk", [cx, cy, r]) => ConvexPolygon::regular(Point::new(*cx, *cy), *r, 256),
                ("disk", [cx, cy, r, n]) if *n >= 3.0 && n.fract() == 0.0 => {
                    ConvexPolygon::regular(Point::new(*cx, *cy), *r, *n as usize)
                }
                ("square", [cx, cy, side]) => ConvexPolygon::square(Point::new(*cx, *cy), *side),
                _ => return Err(self.err(key, format!("expected {kind}:cx,cy,{}", if kind == "disk" { "r[,n]" } else { "side" }))),
            };
            return shape.map(Polygon::from).map_err(|e| self.err(key, e.to_string()));
        }
        let path = self.resolve(v);
        if !path.is_file() {
            return Err(self.err(key, format!("file not found: {}", path.display())));
        }
        bernoulli_core::io::read_polygon(&path).map_err(|e| self.err(key, format!("{}: {e}", path.display())))
    }

    pub fn convex_shape(&self, key: &str) -> Result<ConvexPolygon, ConfigError> {
        let poly = self.shape(key)?;
        if !poly.is_convex(poly.tol_geo()) {
            return Err(self.err(key, "body must be convex"));
        }
        ConvexPolygon::new(poly.vertices().to_vec()).map_err(|e| self.err(key, e.to_string()))
    }

    /// Explicit `grid_bbox = xmin,ymin,xmax,ymax`, if given.
    pub fn grid_bbox(&self) -> Result<Option<BBox>, ConfigError> {
        match self.list_f64("grid_bbox")? {
            None => Ok(None),
            Some(v) if v.len() == 4 && v[0] < v[2] && v[1] < v[3] => {
                Ok(Some(BBox { min: Point::new(v[0], v[1]), max: Point::new(v[2], v[3]) }))
            }
            Some(_) => Err(self.err("grid_bbox", "expected xmin,ymin,xmax,ymax with min < max")),
        }
    }

    /// `λ` as a positive constant or an affine expression, checked positive on `bbox`.
    pub fn lambda(&self, bbox: &BBox) -> Result<LambdaExpr, ConfigError> {
        let v = self.require("lambda")?;
        let e = LambdaExpr::parse(v).map_err(|m| self.err("lambda", m))?;
        let (lo, _) = e.bounds(bbox);
        if !(lo > 0.0) {
            return Err(self.err("lambda", format!("lambda must be positive on the grid box, minimum is {lo}")));
        }
        Ok(e)
    }
}

fn parse_number(s: &str) -> Option<f64> {
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then(|| a / b).filter(|v| v.is_finite());
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// `λ(x, y) = a + b x + c y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaExpr {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LambdaExpr {
    /// Accepts sums of terms `k`, `k*x`, `x`, `k*y`, `y` with optional signs, e.g.
    /// `0.2+0.05*x-0.01*y`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err("empty expression".into());
        }
        let mut e = LambdaExpr { a: 0.0, b: 0.0, c: 0.0 };
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            // split on a sign that is not part of an exponent
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'*') {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, term.strip_prefix('+').unwrap_or(term)),
            };
            let (coef, var) = match body.rsplit_once('*') {
                Some((k, v)) => (k, Some(v)),
                None if body == "x" || body == "y" => ("1", Some(body)),
                None => (body, None),
            };
            let k: f64 = parse_number(coef).ok_or_else(|| format!("bad term {term:?}"))?;
            match var {
                None => e.a += sign * k,
                Some("x") => e.b += sign * k,
                Some("y") => e.c += sign * k,
                Some(v) => return Err(format!("unknown variable {v:?}; only x and y are allowed")),
            }
        }
        Ok(e)
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.a + self.b * p.x + self.c * p.y
    }

    pub fn is_constant(&self) -> bool {
        self.b == 0.0 && self.c == 0.0
    }

    /// Minimum and maximum over `bbox` (attained at corners).
    pub fn bounds(&self, bbox: &BBox) -> (f64, f64) {
        bbox.corners()
            .iter()
            .map(|&q| self.eval(q))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut c = RunConfig::parse("# run\np = 3  # exponent\nlevel=0.4\n\n").unwrap();
        assert_eq!(c.f64_or("p", 2.0).unwrap(), 3.0);
        c.set("p", "2.5").unwrap();
        assert_eq!(c.f64_or("p", 2.0).unwrap(), 2.5);
        assert_eq!(c.f64_req("level").unwrap(), 0.4);
        assert_eq!(c.f64_or("h", 0.125).unwrap(), 0.125);
    }

    #[test]
    fn errors_carry_line_and_key() {
        let e = RunConfig::parse("p = 2\nbogus = 1\n").unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(2), Some("bogus")));
        let e = RunConfig::parse("p 2\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let c = RunConfig::parse("\np = abc\n").unwrap();
        let e = c.f64_or("p", 2.0).unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(2), Some("p")));
        assert!(e.to_string().starts_with("line 2: key 'p'"));
    }

    #[test]
    fn range_check() {
        let c = RunConfig::parse("p = 9\n").unwrap();
        assert!(c.f64_in("p", Some(2.0), 1.2, 8.0).is_err());
    }

    #[test]
    fn fractions_are_numbers() {
        let c = RunConfig::parse("h = 1/128\n").unwrap();
        assert_eq!(c.f64_req("h").unwrap(), 1.0 / 128.0);
    }

    #[test]
    fn missing_shape_file_names_the_key() {
        let c = RunConfig::parse("inner = /definitely/not/here.txt\n").unwrap();
        let e = c.shape("inner").unwrap_err();
        assert_eq!(e.key.as_deref(), Some("inner"));
        assert!(e.message.contains("file not found"));
    }

    #[test]
    fn builtin_shapes() {
        let c = RunConfig::parse("inner = disk:0,0,0.3,64\nouter = square:0,0,2\n").unwrap();
        assert_eq!(c.shape("inner").unwrap().len(), 64);
        assert!((c.shape("outer").unwrap().area() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn affine_lambda() {
        let e = LambdaExpr::parse("0.2 + 0.05*x - 0.01*y").unwrap();
        assert_eq!(e, LambdaExpr { a: 0.2, b: 0.05, c: -0.01 });
        assert_eq!(LambdaExpr::parse("x+1e-1").unwrap(), LambdaExpr { a: 0.1, b: 1.0, c: 0.0 });
        assert_eq!(LambdaExpr::parse("-y+2.5e-1").unwrap(), LambdaExpr { a: 0.25, b: 0.0, c: -1.0 });
        assert!(LambdaExpr::parse("0.2*z").is_err());
        assert!(LambdaExpr::parse("0.2*x*y").is_err());
    }

    #[test]
    fn lambda_positivity_on_box() {
        let bbox = BBox { min: Point::new(-1.0, -1.0), max: Point::new(1.0, 1.0) };
        let ok = RunConfig::parse("lambda = 0.2+0.05*x\n").unwrap();
        assert_eq!(ok.lambda(&bbox).unwrap().bounds(&bbox), (0.15000000000000002, 0.25));
        let bad = RunConfig::parse("lambda = 0.2+0.3*x\n").unwrap();
        assert!(bad.lambda(&bbox).is_err());
    }
}
