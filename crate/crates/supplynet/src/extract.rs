//! Text extraction. Plain text passes through, HTML is stripped of markup and
//! non-content elements, and PDF goes through a pluggable [`PdfExtractor`].

use std::io::Write;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use supplynet_core::pipeline::RawDocument;
use supplynet_core::text::html_to_text;
use supplynet_core::ContentType;

use crate::manifest::FixtureManifest;

/// Text of one document. `failed` marks documents whose extraction produced
/// nothing usable; their text is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedText {
    pub url: String,
    pub text: String,
    pub extractor_id: String,
    pub failed: bool,
}

pub trait PdfExtractor: Send + Sync {
    fn id(&self) -> &str;
    fn extract(&self, doc: &RawDocument) -> Result<String, String>;
}

/// Reads pre-extracted text from `<local_path>.txt` next to a fixture PDF.
/// The PDF itself must at least carry a PDF header.
pub struct SidecarPdf {
    manifest: FixtureManifest,
}

impl SidecarPdf {
    pub fn new(manifest: FixtureManifest) -> Self {
        SidecarPdf { manifest }
    }
}

impl PdfExtractor for SidecarPdf {
    fn id(&self) -> &str {
        "pdf-sidecar"
    }

    fn extract(&self, doc: &RawDocument) -> Result<String, String> {
        if !doc.bytes.starts_with(b"%PDF-") {
            return Err("not a PDF file".into());
        }
        let entry = self
            .manifest
            .by_url(&doc.url)
            .ok_or_else(|| format!("{} has no fixture entry", doc.url))?;
        let mut sidecar = self.manifest.resolve(entry).into_os_string();
        sidecar.push(".txt");
        std::fs::read_to_string(&sidecar).map_err(|e| format!("sidecar {}: {e}", sidecar.to_string_lossy()))
    }
}

/// Runs poppler's `pdftotext` on the payload.
pub struct PdftotextPdf {
    program: String,
}

impl Default for PdftotextPdf {
    fn default() -> Self {
        PdftotextPdf {
            program: "pdftotext".into(),
        }
    }
}

impl PdfExtractor for PdftotextPdf {
    fn id(&self) -> &str {
        "pdftotext"
    }

    fn extract(&self, doc: &RawDocument) -> Result<String, String> {
        let mut child = Command::new(&self.program)
            .args(["-q", "-", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("cannot run {}: {e}", self.program))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let bytes = doc.bytes.clone();
        let writer = std::thread::spawn(move || stdin.write_all(&bytes));
        let output = child.wait_with_output().map_err(|e| e.to_string())?;
        let _ = writer.join();
        if !output.status.success() {
            return Err(format!("{} exited with {}", self.program, output.status));
        }
        String::from_utf8(output.stdout).map_err(|_| "extractor produced invalid UTF-8".into())
    }
}

/// Placeholder used when no PDF backend is configured; every PDF fails.
pub struct NoPdf;

impl PdfExtractor for NoPdf {
    fn id(&self) -> &str {
        "none"
    }

    fn extract(&self, _doc: &RawDocument) -> Result<String, String> {
        Err("no PDF extractor configured".into())
    }
}

pub fn extract_text(doc: &RawDocument, pdf: &dyn PdfExtractor) -> ExtractedText {
    let (extractor_id, result) = match doc.content_type {
        ContentType::Plain => (
            "plain",
            String::from_utf8(doc.bytes.clone()).map_err(|_| "invalid UTF-8".to_string()),
        ),
        ContentType::Html => ("html", Ok(html_to_text(&String::from_utf8_lossy(&doc.bytes)))),
        ContentType::Pdf => (pdf.id(), pdf.extract(doc)),
    };
    match result {
        Ok(text) => ExtractedText {
            url: doc.url.clone(),
            text,
            extractor_id: extractor_id.to_string(),
            failed: false,
        },
        Err(reason) => {
            tracing::warn!(url = %doc.url, %reason, "text extraction failed");
            ExtractedText {
                url: doc.url.clone(),
                text: String::new(),
                extractor_id: extractor_id.to_string(),
                failed: true,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use supplynet_core::Timestamp;

    fn raw(url: &str, bytes: &[u8], content_type: ContentType) -> RawDocument {
        RawDocument {
            url: url.into(),
            bytes: bytes.to_vec(),
            content_type,
            fetched_at: Timestamp(0),
        }
    }

    #[test]
    fn plain_and_html() {
        let t = extract_text(&raw("u", b"Acme Corp supplies Apple", ContentType::Plain), &NoPdf);
        assert_eq!(t.text, "Acme Corp supplies Apple");
        assert!(!t.failed);
        let t = extract_text(&raw("u", b"<p>Acme</p><script>x</script>", ContentType::Html), &NoPdf);
        assert_eq!(t.text, "Acme");
    }

    #[test]
    fn sidecar_pdf() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("l.pdf"), b"%PDF-1.7").unwrap();
        std::fs::write(dir.path().join("l.pdf.txt"), "Acme Corp").unwrap();
        std::fs::write(dir.path().join("bad.pdf"), b"garbage").unwrap();
        let m = FixtureManifest::parse(
            r#"{"a":[{"url":"https://x/l.pdf","local_path":"l.pdf"},{"url":"https://x/bad.pdf","local_path":"bad.pdf"}]}"#,
            dir.path(),
        )
        .unwrap();
        let pdf = SidecarPdf::new(m);
        let ok = extract_text(&raw("https://x/l.pdf", b"%PDF-1.7", ContentType::Pdf), &pdf);
        assert_eq!((ok.text.as_str(), ok.failed), ("Acme Corp", false));
        let corrupt = extract_text(&raw("https://x/bad.pdf", b"garbage", ContentType::Pdf), &pdf);
        assert!(corrupt.failed && corrupt.text.is_empty());
        assert!(extract_text(&raw("https://x/l.pdf", b"%PDF-1.7", ContentType::Pdf), &NoPdf).failed);
    }
}
