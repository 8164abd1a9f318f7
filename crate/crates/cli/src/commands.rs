use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use svad_ntc::channel::{awgn, bpsk_modulate, noise_sigma, NoiseSpec, SoftSequence};
use svad_ntc::convcode::{build_trellis, conv_encode, lock_insert, CodeSpec, LockMode};
use svad_ntc::formats::{self, Manifest};
use svad_ntc::harness::{self, ExperimentConfig, Scheme, SweepTable, ROLE_NOISE};
use svad_ntc::rng::derive_stream;
use svad_ntc::rs::{pack_bits, unpack_bits};
use svad_ntc::viterbi::{decode_with_trellis, DecodeConfig, Metric, NtcPolarity};
use svad_ntc::Bit;

use crate::args::{
    CampaignArgs, CodeArgs, CorruptArgs, DecodeArgs, EncodeArgs, InputFormat, NtcStudyArgs, OutputFormat,
    SweepArgs, TableFormat, TrellisArgs,
};
use crate::fail::{CliResult, Failure};

const DEFAULT_NTC: usize = 6;

struct Code {
    spec: CodeSpec,
    lock: LockMode,
    ntc: usize,
}

impl Code {
    /// Explicit flags win over the manifest, which wins over defaults.
    fn resolve(args: &CodeArgs, manifest: Option<&Manifest>) -> CliResult<Self> {
        let stored = |key: &str| manifest.and_then(|m| m.get(key));
        let spec = match (&args.generators, stored("generators")) {
            (Some(spec), _) => spec.clone(),
            (None, Some(text)) => CodeSpec::from_octal(text).map_err(manifest_error("generators"))?,
            (None, None) => CodeSpec::standard(),
        };
        let lock = match (args.lock, stored("lock")) {
            (Some(lock), _) => lock,
            (None, Some(text)) => text.parse().map_err(manifest_error("lock"))?,
            (None, None) => LockMode::default(),
        };
        let ntc = match (args.ntc, stored("ntc")) {
            (Some(n), _) => {
                if n > 0 && !lock.is_locked() {
                    return Err(Failure::Usage("--ntc requires --lock lower or --lock higher".into()));
                }
                n
            }
            // a stored count only applies if the lock survives resolution
            (None, Some(_)) if !lock.is_locked() => 0,
            (None, Some(text)) => text
                .parse()
                .map_err(|_| Failure::Data(format!("manifest: bad ntc `{text}`")))?,
            (None, None) if lock.is_locked() => DEFAULT_NTC,
            (None, None) => 0,
        };
        Ok(Self { spec, lock, ntc })
    }

    fn rate(&self) -> f64 {
        1.0 / (self.spec.outputs() * self.lock.period()) as f64
    }

    fn record(&self, manifest: &mut Manifest) {
        manifest.set("generators", self.spec.octal());
        manifest.set("lock", self.lock.name());
        manifest.set("ntc", self.ntc);
    }
}

fn manifest_error(key: &'static str) -> impl Fn(svad_ntc::Error) -> Failure {
    move |e| Failure::Data(format!("manifest: bad {key}: {e}"))
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

/// Writes through a sibling temp file and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

/// Loads an explicit manifest (which must exist) or the default sidecar (which may not).
fn load_manifest(explicit: Option<&Path>, data_file: &Path) -> CliResult<Option<Manifest>> {
    let path = match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let p = sidecar(data_file);
            if !p.exists() {
                return Ok(None);
            }
            p
        }
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::io(&path, e))?;
    Ok(Some(Manifest::parse(&text)?))
}

fn read_samples(path: &Path) -> CliResult<Vec<f64>> {
    Ok(formats::decode_sample_file(&read(path)?)?)
}

pub fn encode(args: &EncodeArgs) -> CliResult<()> {
    let code = Code::resolve(&args.code, None)?;
    let bytes = read(&args.input)?;
    let as_bit_file = match args.input_format {
        InputFormat::Auto => formats::is_bit_file(&bytes),
        InputFormat::Ntcf => true,
        InputFormat::Raw => false,
    };
    let data: Vec<Bit> = if as_bit_file {
        formats::decode_bit_file(&bytes)?
    } else {
        unpack_bits(&bytes, bytes.len() * 8)
    };
    let locked = lock_insert(&data, code.lock);
    let symbols = bpsk_modulate(&conv_encode(&code.spec, &locked));
    write_atomic(&args.out, &formats::encode_sample_file(symbols.samples()))?;

    let mut manifest = Manifest::default();
    code.record(&mut manifest);
    manifest.set("data_bits", data.len());
    manifest.set("input_format", if as_bit_file { "ntcf" } else { "raw" });
    manifest.set("rate", format!("{:.6}", code.rate()));
    let manifest_path = args.manifest.clone().unwrap_or_else(|| sidecar(&args.out));
    write_atomic(&manifest_path, manifest.render().as_bytes())?;

    println!(
        "encoded {} data bits -> {} encoder inputs -> {} channel symbols; code {} lock {}, effective rate {:.6}",
        data.len(),
        locked.len(),
        symbols.len(),
        code.spec.octal(),
        code.lock.name(),
        code.rate()
    );
    Ok(())
}

pub fn corrupt(args: &CorruptArgs) -> CliResult<()> {
    let manifest = load_manifest(args.manifest.as_deref(), &args.input)?;
    let samples = read_samples(&args.input)?;
    let code = Code::resolve(&args.code, manifest.as_ref())?;
    let normalization = args.normalization.unwrap_or_default();
    let sigma = match (args.sigma, args.ebno) {
        (Some(sigma), _) if sigma >= 0.0 && sigma.is_finite() => sigma,
        (Some(sigma), _) => return Err(Failure::Usage(format!("--sigma {sigma} must be finite and non-negative"))),
        (None, Some(ebno_db)) => {
            let spec = NoiseSpec {
                ebno_db,
                normalization,
                code_rate: code.rate(),
            };
            spec.validate().map_err(|e| Failure::Usage(format!("--ebno: {e}")))?;
            noise_sigma(&spec)
        }
        (None, None) => return Err(Failure::Usage("one of --sigma or --ebno is required".into())),
    };
    let clean = SoftSequence::new(samples, 1)?;
    let noisy = awgn(&clean, sigma, &mut derive_stream(args.seed, &[ROLE_NOISE]));
    write_atomic(&args.out, &formats::encode_sample_file(noisy.samples()))?;

    let mut out_manifest = manifest.unwrap_or_default();
    code.record(&mut out_manifest);
    out_manifest.set("seed", args.seed);
    out_manifest.set("sigma", sigma);
    if let Some(ebno) = args.ebno {
        out_manifest.set("ebno_db", ebno);
        out_manifest.set("normalization", normalization.name());
    }
    write_atomic(&sidecar(&args.out), out_manifest.render().as_bytes())?;
    println!("added noise with sigma {sigma:.6} to {} samples (seed {})", noisy.len(), args.seed);
    Ok(())
}

pub fn decode(args: &DecodeArgs) -> CliResult<()> {
    let manifest = load_manifest(args.manifest.as_deref(), &args.input)?;
    let samples = read_samples(&args.input)?;
    let code = Code::resolve(&args.code, manifest.as_ref())?;
    let cfg = DecodeConfig {
        metric: args.metric.unwrap_or(Metric::SoftEuclidean),
        lock_mode: code.lock,
        ntc_count: code.ntc,
        start_state_forced: true,
        ntc_polarity: args.ntc_polarity.map(NtcPolarity::from).unwrap_or_default(),
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let trellis = build_trellis(&code.spec);
    let (data, result) = decode_with_trellis(&trellis, &SoftSequence::new(samples, 1)?, &cfg)?;

    if let Some(expected) = manifest.as_ref().and_then(|m| m.get("data_bits")) {
        if expected != data.len().to_string() {
            return Err(Failure::Data(format!(
                "manifest records {expected} data bits but the samples decode to {}",
                data.len()
            )));
        }
    }
    let stored_format = manifest.as_ref().and_then(|m| m.get("input_format"));
    let format = match (args.output_format, stored_format) {
        (Some(f), _) => f,
        (None, Some("raw")) => OutputFormat::Raw,
        _ => OutputFormat::Ntcf,
    };
    let bytes = match format {
        OutputFormat::Ntcf => formats::encode_bit_file(&data),
        OutputFormat::Raw if data.len() % 8 == 0 => pack_bits(&data),
        OutputFormat::Raw => {
            return Err(Failure::Data(format!("{} decoded bits do not fill whole bytes", data.len())))
        }
    };
    write_atomic(&args.out, &bytes)?;
    println!("decoded {} data bits; final path metric {:.6}", data.len(), result.final_metric);
    Ok(())
}

fn experiment(campaign: &CampaignArgs, ebno_points: Vec<f64>, schemes: Vec<Scheme>) -> CliResult<ExperimentConfig> {
    let code = Code::resolve(&campaign.code, None)?;
    if let Some(sigma) = campaign.sigma {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Failure::Usage(format!("--sigma {sigma} must be finite and non-negative")));
        }
    }
    if campaign.frame_bits == Some(0) {
        return Err(Failure::Usage("--frame-bits must be at least 1".into()));
    }
    if campaign.bits == 0 {
        return Err(Failure::Usage("--bits must be at least 1".into()));
    }
    Ok(ExperimentConfig {
        info_bits: campaign.bits,
        ebno_points,
        schemes,
        master_seed: campaign.seed,
        code_spec: code.spec,
        lock_mode: code.lock,
        ntc_count: code.ntc,
        ntc_polarity: campaign.ntc_polarity.into(),
        rs_params: campaign.rs,
        normalization: campaign.normalization,
        frame_len_bits: campaign.frame_bits,
        sigma_override: campaign.sigma,
    })
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(Failure::Usage("--workers must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Usage(format!("--workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn write_csv(campaign: &CampaignArgs, table: &SweepTable) -> CliResult<()> {
    if let Some(out) = &campaign.out {
        write_atomic(out, harness::emit_csv(table).as_bytes())?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn dat_path(prefix: &Path, series: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!(".{series}.dat"));
    PathBuf::from(name)
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let cfg = experiment(&args.campaign, args.ebno.0.clone(), args.schemes.0.clone())?;
    let table = with_workers(args.campaign.workers, || harness::run_sweep(&cfg))??;
    print!("{}", harness::render_text(&table));
    match (args.campaign.format, &args.campaign.out) {
        (TableFormat::Csv, _) => write_csv(&args.campaign, &table)?,
        (TableFormat::Dat, Some(prefix)) => {
            for scheme in &cfg.schemes {
                let path = dat_path(prefix, scheme.name());
                write_atomic(&path, harness::emit_dat(&table, *scheme).as_bytes())?;
                println!("wrote {}", path.display());
            }
        }
        (TableFormat::Dat, None) => return Err(Failure::Usage("--format dat needs --out PREFIX".into())),
    }
    Ok(())
}

pub fn ntc_study(args: &NtcStudyArgs) -> CliResult<()> {
    let mut cfg = experiment(&args.campaign, args.ebno.0.clone(), vec![Scheme::SvadNtc])?;
    if !cfg.lock_mode.is_locked() {
        return Err(Failure::Usage("ntc-study requires --lock lower or --lock higher".into()));
    }
    cfg.ntc_count = args.ntc_values.0.iter().copied().max().unwrap_or(0);
    let table = with_workers(args.campaign.workers, || harness::ntc_study(&cfg, &args.ntc_values.0))??;
    print!("{}", harness::render_text(&table));
    match (args.campaign.format, &args.campaign.out) {
        (TableFormat::Csv, _) => write_csv(&args.campaign, &table)?,
        (TableFormat::Dat, Some(prefix)) => {
            let mut text = String::from("# ebno_db ntc residual_errors (svad)\n");
            for r in &table.rows {
                let _ = writeln!(text, "{} {} {}", r.ebno_db, r.ntc_count, r.residual_errors);
            }
            let path = dat_path(prefix, "ntc");
            write_atomic(&path, text.as_bytes())?;
            println!("wrote {}", path.display());
        }
        (TableFormat::Dat, None) => return Err(Failure::Usage("--format dat needs --out PREFIX".into())),
    }
    Ok(())
}

pub fn trellis(args: &TrellisArgs) -> CliResult<()> {
    let code = Code::resolve(&args.code, None)?;
    print!("{}", trellis_text(&code.spec, code.lock));
    Ok(())
}

fn trellis_text(spec: &CodeSpec, lock: LockMode) -> String {
    let trellis = build_trellis(spec);
    let excluded = trellis.excluded_states(lock);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "code {}: constraint length {}, {} states, {} outputs per input",
        spec.octal(),
        spec.constraint_length(),
        trellis.state_count(),
        spec.outputs()
    );
    let _ = writeln!(out, "catastrophic: {}", if spec.is_catastrophic() { "yes" } else { "no" });
    let names: Vec<String> = excluded.iter().map(|s| format!("S{s}")).collect();
    let _ = writeln!(
        out,
        "lock {}: excluded states {}",
        lock.name(),
        if names.is_empty() { "none".to_string() } else { names.join(" ") }
    );
    let _ = writeln!(out, "state input -> next output");
    for state in 0..trellis.state_count() {
        for input in [0, 1] {
            let t = trellis.transition(state, input);
            let bits: String = (0..spec.outputs())
                .map(|j| if t.output >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            let mark = if excluded.contains(&state) { "  excluded" } else { "" };
            let _ = writeln!(out, "S{state} {input} -> S{} {bits}{mark}", t.next_state);
        }
    }
    out
}
