use crate::model::Continent;

// ISO-3166 alpha-2 codes by region. The Middle East is kept apart from Asia
// and Africa so that it forms its own reporting group.
const EUROPE: &[&str] = &[
    "AD", "AL", "AT", "AX", "BA", "BE", "BG", "BY", "CH", "CY", "CZ", "DE", "DK", "EE", "ES", "FI", "FO",
    "FR", "GB", "GG", "GI", "GR", "HR", "HU", "IE", "IM", "IS", "IT", "JE", "LI", "LT", "LU", "LV", "MC",
    "MD", "ME", "MK", "MT", "NL", "NO", "PL", "PT", "RO", "RS", "RU", "SE", "SI", "SJ", "SK", "SM", "UA",
    "VA", "XK",
];
const AFRICA: &[&str] = &[
    "AO", "BF", "BI", "BJ", "BW", "CD", "CF", "CG", "CI", "CM", "CV", "DJ", "DZ", "EG", "EH", "ER", "ET",
    "GA", "GH", "GM", "GN", "GQ", "GW", "KE", "KM", "LR", "LS", "LY", "MA", "MG", "ML", "MR", "MU", "MW",
    "MZ", "NA", "NE", "NG", "RE", "RW", "SC", "SD", "SH", "SL", "SN", "SO", "SS", "ST", "SZ", "TD", "TG",
    "TN", "TZ", "UG", "YT", "ZA", "ZM", "ZW",
];
const NORTH_AMERICA: &[&str] = &[
    "AG", "AI", "AW", "BB", "BL", "BM", "BQ", "BS", "BZ", "CA", "CR", "CU", "CW", "DM", "DO", "GD", "GL",
    "GP", "GT", "HN", "HT", "JM", "KN", "KY", "LC", "MF", "MQ", "MS", "MX", "NI", "PA", "PM", "PR", "SV",
    "SX", "TC", "TT", "US", "VC", "VG", "VI",
];
const ASIA: &[&str] = &[
    "AF", "AM", "AZ", "BD", "BN", "BT", "CN", "GE", "HK", "ID", "IN", "JP", "KG", "KH", "KP", "KR", "KZ",
    "LA", "LK", "MM", "MN", "MO", "MV", "MY", "NP", "PH", "PK", "SG", "TH", "TJ", "TL", "TM", "TW", "UZ",
    "VN",
];
const SOUTH_AMERICA: &[&str] = &[
    "AR", "BO", "BR", "CL", "CO", "EC", "FK", "GF", "GY", "PE", "PY", "SR", "UY", "VE",
];
const OCEANIA: &[&str] = &[
    "AS", "AU", "CK", "FJ", "FM", "GU", "KI", "MH", "MP", "NC", "NF", "NR", "NU", "NZ", "PF", "PG", "PN",
    "PW", "SB", "TK", "TO", "TV", "UM", "VU", "WF", "WS",
];
const MIDDLE_EAST: &[&str] = &[
    "AE", "BH", "IL", "IQ", "IR", "JO", "KW", "LB", "OM", "PS", "QA", "SA", "SY", "TR", "YE",
];

pub(crate) fn continent_of(code: &str) -> Option<Continent> {
    let code = code.trim();
    if code.len() != 2 {
        return None;
    }
    let mut upper = [0u8; 2];
    for (slot, b) in upper.iter_mut().zip(code.bytes()) {
        *slot = b.to_ascii_uppercase();
    }
    let code = core::str::from_utf8(&upper).ok()?;
    [
        (EUROPE, Continent::EU),
        (AFRICA, Continent::AF),
        (NORTH_AMERICA, Continent::NA),
        (ASIA, Continent::AS),
        (SOUTH_AMERICA, Continent::SA),
        (OCEANIA, Continent::OC),
        (MIDDLE_EAST, Continent::ME),
    ]
    .into_iter()
    .find(|(codes, _)| codes.contains(&code))
    .map(|(_, c)| c)
}
