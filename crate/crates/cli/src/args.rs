use std::path::PathBuf;

use alexcover::laurent::DEFAULT_TOLERANCE;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

#[derive(Parser, Debug)]
#[command(name = "alexcover", version, about = "Alexander polynomials, cyclic cover homology and torsion growth")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Characteristics to work over; 0 means the rationals.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,2,3,5")]
    pub chars: Vec<u64>,
    /// Largest cover order N in scans.
    #[arg(long, global = true, default_value_t = 40)]
    pub max_cover: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for certified floating point values.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Alexander polynomials, alpha and limit scans of a complex or presentation.
    Invariants {
        /// Complex JSON ({"ranks","boundaries"}) or presentation JSON ({"generators","relators"}).
        input: PathBuf,
        /// Only this homological degree.
        #[arg(long)]
        degree: Option<usize>,
        /// Generator images of the epimorphism to Z, for presentations.
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<i64>>,
        /// Specializations per generic dimension estimate.
        #[arg(long, default_value_t = 7)]
        trials: usize,
    },
    /// Homology of the finite cyclic covers.
    Cover {
        input: PathBuf,
        /// A single cover order; default is every N up to --max-cover.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<i64>>,
    },
    /// Orbifold fundamental groups: predicted against computed invariants.
    Orbifold {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        r: usize,
        /// Cone point orders.
        #[arg(long, value_delimiter = ',')]
        mu: Vec<u64>,
    },
    /// Aomoto complex Betti numbers and torsion of a line arrangement.
    Arrangement {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        nu: Vec<i64>,
    },
    /// Multinet axioms and the 3-net certificate.
    Multinet { arrangement: PathBuf, multinet: PathBuf },
    /// Canonical form and Mahler measure of an integer Laurent polynomial.
    Mahler {
        /// Coefficients from the lowest power up.
        #[arg(value_delimiter = ',', required = true)]
        coeffs: Vec<BigInt>,
        #[arg(long, default_value_t = 0)]
        min_exp: i64,
    },
    /// Built-in fixtures.
    Construct {
        #[command(subcommand)]
        what: Construct,
        /// Also write the arrangement as standalone JSON.
        #[arg(long)]
        arrangement_out: Option<PathBuf>,
        /// Also write the multinet as standalone JSON.
        #[arg(long)]
        multinet_out: Option<PathBuf>,
        /// Also write the equivariant complex as standalone JSON.
        #[arg(long)]
        complex_out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// The Ceva arrangement of 3m lines with its 3-net.
    Ceva {
        #[arg(long)]
        m: u64,
    },
    /// The deleted B3 arrangement.
    DeletedB3,
    /// The monomial arrangement with two coordinate lines kept.
    DeletedMonomial {
        #[arg(long)]
        mu: u64,
    },
    /// A pencil of concurrent lines with the given weights.
    Pencil {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<i64>,
    },
    /// Lift residues modulo n to multiplicities.
    Lift {
        #[arg(long, value_delimiter = ',', required = true)]
        chi: Vec<i64>,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
    },
}
