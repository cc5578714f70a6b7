//! Fixed synthetic vocabularies, one per class, pairwise disjoint across
//! every built-in taxonomy.

use crate::error::{Error, Result};
use crate::taxonomy::{INVOICE5, RESUME6, SOURCE8};

struct Lexicon {
    taxonomy: &'static str,
    label: &'static str,
    key: &'static str,
    words: &'static [&'static str],
}

const LEXICONS: &[Lexicon] = &[
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[0],
        key: "title",
        words: &[
            "quantum", "horizons", "chronicle", "odyssey", "manifesto", "renaissance", "paradigm", "frontier",
            "legacy", "genesis", "voyage", "epoch", "saga", "zenith", "vanguard", "pinnacle", "spectrum", "nexus",
            "momentum", "catalyst", "tapestry", "beacon",
        ],
    },
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[1],
        key: "heading",
        words: &[
            "introduction", "background", "methods", "results", "discussion", "conclusion", "overview",
            "analysis", "approach", "evaluation", "motivation", "framework", "foundations", "outlook", "synthesis",
            "perspectives", "principles", "context", "scope", "findings", "remarks", "appendix",
        ],
    },
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[2],
        key: "subheading",
        words: &[
            "details", "setup", "protocol", "baseline", "variants", "ablation", "limitations", "notation",
            "preliminaries", "procedure", "criteria", "metrics", "configuration", "assumptions", "parameters",
            "tuning", "examples", "observations", "extensions", "caveats", "derivation", "sketch",
        ],
    },
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[3],
        key: "text",
        words: &[
            "the", "of", "and", "is", "was", "which", "from", "with", "this", "that", "these", "their", "been",
            "were", "would", "could", "often", "between", "through", "however", "because", "although", "several",
            "general", "various", "within", "during", "again",
        ],
    },
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[4],
        key: "list",
        words: &[
            "first", "second", "third", "next", "finally", "item", "point", "step", "bullet", "entry", "option",
            "choice", "also", "plus", "another", "further", "lastly", "besides", "moreover", "additionally",
            "secondly", "thirdly",
        ],
    },
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[5],
        key: "table",
        words: &[
            "cell", "row", "column", "value", "mean", "median", "count", "ratio", "rate", "min", "max", "avg",
            "std", "index", "unit", "score", "rank", "level", "group", "range", "sample", "trial",
        ],
    },
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[6],
        key: "image",
        words: &[
            "photo", "picture", "diagram", "chart", "graph", "plot", "illustration", "drawing", "render",
            "snapshot", "portrait", "landscape", "scene", "graphic", "icon", "pixel", "thumbnail", "canvas",
            "mosaic", "collage", "frame", "pictogram",
        ],
    },
    Lexicon {
        taxonomy: "source8",
        label: SOURCE8[7],
        key: "caption",
        words: &[
            "fig", "tab", "shown", "depicts", "illustrates", "above", "below", "left", "right", "panel", "caption",
            "legend", "source", "adapted", "courtesy", "inset", "top", "bottom", "compares", "visualizes",
            "denotes", "highlighted",
        ],
    },
    Lexicon {
        taxonomy: "invoice5",
        label: INVOICE5[0],
        key: "logo",
        words: &[
            "acme", "globex", "initech", "umbrella", "hooli", "vandelay", "wonka", "stark", "wayne", "cyberdyne",
            "soylent", "tyrell", "oscorp", "aperture", "monarch", "gringotts", "dunder", "mifflin", "pied",
            "piper", "vehement", "massive",
        ],
    },
    Lexicon {
        taxonomy: "invoice5",
        label: INVOICE5[1],
        key: "address",
        words: &[
            "street", "city", "zip", "avenue", "road", "lane", "suite", "floor", "building", "state", "country",
            "postal", "boulevard", "drive", "court", "plaza", "district", "county", "province", "apartment",
            "block", "sector",
        ],
    },
    Lexicon {
        taxonomy: "invoice5",
        label: INVOICE5[2],
        key: "info",
        words: &[
            "invoice", "bill", "number", "date", "issued", "order", "customer", "account", "reference",
            "purchase", "terms", "payment", "vendor", "client", "id", "po", "period", "billing", "statement",
            "receipt", "dated", "ref",
        ],
    },
    Lexicon {
        taxonomy: "invoice5",
        label: INVOICE5[3],
        key: "tables",
        words: &[
            "description", "qty", "quantity", "price", "hours", "service", "product", "sku", "code", "labor",
            "parts", "materials", "shipping", "handling", "consulting", "license", "support", "subscription",
            "delivery", "installation", "maintenance", "widget",
        ],
    },
    Lexicon {
        taxonomy: "invoice5",
        label: INVOICE5[4],
        key: "amount",
        words: &[
            "total", "due", "tax", "amount", "balance", "subtotal", "vat", "grand", "payable", "net", "gross",
            "discount", "paid", "remaining", "outstanding", "charges", "fees", "credit", "deposit", "owed", "usd",
            "eur",
        ],
    },
    Lexicon {
        taxonomy: "resume6",
        label: RESUME6[0],
        key: "education",
        words: &[
            "university", "college", "degree", "bachelor", "master", "phd", "diploma", "school", "graduated",
            "gpa", "thesis", "major", "minor", "coursework", "academy", "institute", "campus", "honors", "dean",
            "semester", "scholarship", "alumni",
        ],
    },
    Lexicon {
        taxonomy: "resume6",
        label: RESUME6[1],
        key: "experience",
        words: &[
            "experience", "engineer", "developer", "manager", "intern", "company", "led", "built", "designed",
            "managed", "worked", "role", "team", "project", "delivered", "senior", "junior", "position",
            "employer", "responsibilities", "achieved", "launched", "maintained",
        ],
    },
    Lexicon {
        taxonomy: "resume6",
        label: RESUME6[2],
        key: "bio",
        words: &[
            "name", "email", "phone", "linkedin", "github", "born", "nationality", "contact", "mobile", "website",
            "portfolio", "citizen", "birthday", "gender", "married", "homepage", "twitter", "handle", "resident",
            "age", "profile", "location",
        ],
    },
    Lexicon {
        taxonomy: "resume6",
        label: RESUME6[3],
        key: "skills",
        words: &[
            "skills", "python", "java", "rust", "sql", "excel", "leadership", "communication", "teamwork",
            "docker", "kubernetes", "linux", "git", "statistics", "marketing", "negotiation", "design", "cloud",
            "aws", "javascript", "react", "tableau", "spanish",
        ],
    },
    Lexicon {
        taxonomy: "resume6",
        label: RESUME6[4],
        key: "summary",
        words: &[
            "summary", "motivated", "passionate", "dedicated", "professional", "experienced", "seeking", "driven",
            "focused", "oriented", "dynamic", "creative", "detail", "proactive", "enthusiastic", "ambitious",
            "adaptable", "versatile", "reliable", "objective", "career", "goals",
        ],
    },
    Lexicon {
        taxonomy: "resume6",
        label: RESUME6[5],
        key: "other",
        words: &[
            "hobbies", "interests", "volunteer", "awards", "certifications", "languages", "references",
            "publications", "hiking", "chess", "travel", "music", "reading", "photography", "cooking", "football",
            "marathon", "charity", "mentoring", "painting", "gardening", "cycling",
        ],
    },
];

fn find(spec: &str) -> Option<&'static Lexicon> {
    let (taxonomy, label) = match spec.split_once(':') {
        Some((t, l)) => (Some(t), l),
        None => (None, spec),
    };
    LEXICONS.iter().find(|lex| {
        taxonomy.is_none_or(|t| t == lex.taxonomy) && (lex.label == label || lex.key.eq_ignore_ascii_case(label))
    })
}

/// Vocabulary for `label`.
///
/// Accepts a full label (`"(Total) Amount Information"`), or either a full
/// label or short key qualified by taxonomy (`"invoice5:Amount"`).
pub fn class_lexicon(label: &str) -> Result<&'static [&'static str]> {
    find(label).map(|lex| lex.words).ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

/// All labels with a lexicon, as `(taxonomy, label)` pairs.
pub fn lexicon_labels() -> impl Iterator<Item = (&'static str, &'static str)> {
    LEXICONS.iter().map(|lex| (lex.taxonomy, lex.label))
}
