//! Minimal plain SMTP delivery of outbox entries.
//!
//! Meant for a local relay; no TLS or authentication.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::time::Duration;

use crate::service::config::SmtpConfig;
use crate::service::outbox::{Outbox, OutboxEntry};

fn expect(reader: &mut impl BufRead, code: &str) -> std::io::Result<()> {
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Err(std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "smtp connection closed"));
        }
        if !line.starts_with(code) {
            return Err(std::io::Error::other(format!("smtp: expected {code}, got {}", line.trim_end())));
        }
        // "250-" continues a multi-line reply, "250 " ends it
        if line.as_bytes().get(3) != Some(&b'-') {
            return Ok(());
        }
    }
}

fn dot_stuff(body: &str) -> String {
    body.lines()
        .map(|l| if l.starts_with('.') { format!(".{l}") } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\r\n")
}

pub fn send(config: &SmtpConfig, entry: &OutboxEntry) -> std::io::Result<()> {
    let stream = TcpStream::connect((config.host.as_str(), config.port))?;
    stream.set_read_timeout(Some(Duration::from_secs(30)))?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut w = stream;
    expect(&mut reader, "220")?;
    let steps = [
        ("EHLO supplynet\r\n".to_string(), "250"),
        (format!("MAIL FROM:<{}>\r\n", config.from), "250"),
        (format!("RCPT TO:<{}>\r\n", entry.to), "250"),
        ("DATA\r\n".to_string(), "354"),
    ];
    for (command, code) in steps {
        w.write_all(command.as_bytes())?;
        expect(&mut reader, code)?;
    }
    let message = format!(
        "From: {}\r\nTo: {}\r\nSubject: {}\r\n\r\n{}\r\n.\r\n",
        config.from,
        entry.to,
        entry.subject,
        dot_stuff(&entry.body)
    );
    w.write_all(message.as_bytes())?;
    expect(&mut reader, "250")?;
    w.write_all(b"QUIT\r\n")?;
    Ok(())
}

/// Sends every pending entry, marking each delivered on success. Returns the
/// number delivered; stops at the first failure.
pub fn deliver_pending(outbox: &mut Outbox, config: &SmtpConfig) -> std::io::Result<usize> {
    let pending: Vec<OutboxEntry> = outbox.pending().cloned().collect();
    let mut sent = 0;
    for entry in pending {
        send(config, &entry)?;
        outbox.mark_delivered(entry.id)?;
        sent += 1;
    }
    Ok(sent)
}
