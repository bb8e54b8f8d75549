//! Classic pcap ingestion down to DNS question names, plus a matching
//! writer for synthetic captures.
//!
//! Scope is deliberately narrow and bit-exact: microsecond pcap magic,
//! Ethernet II, IPv4, UDP port 53, first question only. Responses echo
//! the question, so answer records never need decoding. Anything else
//! is skipped and tallied, never fatal: a capture full of garbage still
//! ingests the packets that do conform.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Read, Write};
use std::net::Ipv4Addr;

use crate::domain::{Direction, QueryName, QueryRecord, Timestamp};
use crate::error::{Error, Result};

/// Microsecond-timestamp pcap magic in file order for little-endian
/// files. Byte-swapped files carry the same bytes reversed.
const MAGIC_USEC: u32 = 0xa1b2_c3d4;
const MAGIC_USEC_SWAPPED: u32 = 0xd4c3_b2a1;

/// Ethernet link type code.
const LINKTYPE_ETHERNET: u32 = 1;

/// Compression pointers may hop at most this many times; real names
/// need a handful, loops run forever.
const MAX_POINTER_HOPS: usize = 128;

/// Upper bound on a single captured frame we are willing to buffer.
const MAX_CAPTURED_LEN: usize = 1 << 24;

const SERVER_IP: Ipv4Addr = Ipv4Addr::new(192, 0, 2, 53);
const CLIENT_PORT: u16 = 34567;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

/// Global-header facts about an open capture.
#[derive(Debug, Clone, Copy)]
pub struct PcapSource {
    pub byte_order: ByteOrder,
    pub snaplen: u32,
    pub linktype: u32,
}

/// Ingestion tally. Every packet is either emitted as a record or
/// lands in `skip_reasons`.
#[derive(Debug, Clone, Default)]
pub struct IngestStats {
    pub packets_total: u64,
    pub packets_dns: u64,
    pub packets_skipped: u64,
    pub skip_reasons: BTreeMap<&'static str, u64>,
}

impl IngestStats {
    fn skip(&mut self, reason: &'static str) {
        self.packets_skipped += 1;
        *self.skip_reasons.entry(reason).or_insert(0) += 1;
    }
}

/// Streaming pcap reader yielding one record per conforming DNS packet.
pub struct PcapReader<R: Read> {
    reader: R,
    source: PcapSource,
    stats: IngestStats,
    next_seq: u64,
    done: bool,
}

/// Read as much as fits; unlike `read_exact`, a clean EOF partway
/// through is reported as a short count instead of an error.
fn read_fully<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

impl<R: Read> PcapReader<R> {
    /// Parse the 24-byte global header and fail fast on anything that
    /// is not a microsecond Ethernet pcap.
    pub fn open(mut reader: R) -> Result<Self> {
        let mut header = [0u8; 24];
        let got = read_fully(&mut reader, &mut header)?;
        if got < 4 {
            return Err(Error::TruncatedHeader);
        }
        let magic = u32::from_le_bytes([header[0], header[1], header[2], header[3]]);
        let byte_order = match magic {
            MAGIC_USEC => ByteOrder::Little,
            MAGIC_USEC_SWAPPED => ByteOrder::Big,
            other => return Err(Error::BadMagic(other)),
        };
        if got < 24 {
            return Err(Error::TruncatedHeader);
        }
        let u32_at = |off: usize| -> u32 {
            let b = [header[off], header[off + 1], header[off + 2], header[off + 3]];
            match byte_order {
                ByteOrder::Little => u32::from_le_bytes(b),
                ByteOrder::Big => u32::from_be_bytes(b),
            }
        };
        let snaplen = u32_at(16);
        let linktype = u32_at(20);
        if linktype != LINKTYPE_ETHERNET {
            return Err(Error::UnsupportedLinkType(linktype));
        }
        Ok(PcapReader {
            reader,
            source: PcapSource {
                byte_order,
                snaplen,
                linktype,
            },
            stats: IngestStats::default(),
            next_seq: 0,
            done: false,
        })
    }

    pub fn source(&self) -> &PcapSource {
        &self.source
    }

    /// Tally so far; complete once the iterator has returned `None`.
    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    pub fn into_stats(self) -> IngestStats {
        self.stats
    }

    fn u32_field(&self, b: [u8; 4]) -> u32 {
        match self.source.byte_order {
            ByteOrder::Little => u32::from_le_bytes(b),
            ByteOrder::Big => u32::from_be_bytes(b),
        }
    }

    /// Pull the next record header + body. `None` ends the capture; a
    /// `None` body means the packet was already tallied as skipped.
    fn next_frame(&mut self) -> Option<(Timestamp, Option<Vec<u8>>)> {
        let mut header = [0u8; 16];
        match read_fully(&mut self.reader, &mut header) {
            Ok(0) => return None,
            Ok(16) => {}
            Ok(_) | Err(_) => {
                self.stats.packets_total += 1;
                self.stats.skip("truncated-record");
                return None;
            }
        }
        self.stats.packets_total += 1;
        let ts = Timestamp {
            sec: self.u32_field([header[0], header[1], header[2], header[3]]),
            usec: self.u32_field([header[4], header[5], header[6], header[7]]),
        };
        let incl_len = self.u32_field([header[8], header[9], header[10], header[11]]) as usize;
        if incl_len > MAX_CAPTURED_LEN {
            self.stats.skip("oversized-packet");
            let mut sink = io::sink();
            if io::copy(&mut (&mut self.reader).take(incl_len as u64), &mut sink).is_err() {
                self.done = true;
            }
            return Some((ts, None));
        }
        let mut body = vec![0u8; incl_len];
        match read_fully(&mut self.reader, &mut body) {
            Ok(n) if n == incl_len => Some((ts, Some(body))),
            _ => {
                self.stats.skip("truncated-record");
                self.done = true;
                None
            }
        }
    }
}

/// Decoded question plus addressing, before record assembly.
struct DecodedQuery {
    name: QueryName,
    src_ip: Ipv4Addr,
    dst_ip: Ipv4Addr,
    is_response: bool,
}

/// Walk one Ethernet frame down to the first DNS question. Returns the
/// skip reason when the packet is not a conforming DNS-over-UDP frame.
fn decode_packet(data: &[u8]) -> std::result::Result<DecodedQuery, &'static str> {
    if data.len() < 14 {
        return Err("short-ethernet");
    }
    let ethertype = u16::from_be_bytes([data[12], data[13]]);
    if ethertype != 0x0800 {
        return Err("non-ipv4");
    }
    let ip = &data[14..];
    if ip.len() < 20 {
        return Err("short-ip");
    }
    if ip[0] >> 4 != 4 {
        return Err("non-ipv4");
    }
    let ihl = ((ip[0] & 0x0f) as usize) * 4;
    if ihl < 20 || ip.len() < ihl {
        return Err("short-ip");
    }
    if ip[9] != 17 {
        return Err("non-udp");
    }
    let src_ip = Ipv4Addr::new(ip[12], ip[13], ip[14], ip[15]);
    let dst_ip = Ipv4Addr::new(ip[16], ip[17], ip[18], ip[19]);
    let udp = &ip[ihl..];
    if udp.len() < 8 {
        return Err("short-udp");
    }
    let src_port = u16::from_be_bytes([udp[0], udp[1]]);
    let dst_port = u16::from_be_bytes([udp[2], udp[3]]);
    if src_port != 53 && dst_port != 53 {
        return Err("non-dns-port");
    }
    // trust the UDP length when it fits, otherwise take what was captured
    let udp_len = u16::from_be_bytes([udp[4], udp[5]]) as usize;
    let payload = if udp_len >= 8 && udp_len <= udp.len() {
        &udp[8..udp_len]
    } else {
        &udp[8..]
    };
    if payload.len() < 12 {
        return Err("short-dns");
    }
    let flags = u16::from_be_bytes([payload[2], payload[3]]);
    let qdcount = u16::from_be_bytes([payload[4], payload[5]]);
    if qdcount == 0 {
        return Err("no-question");
    }
    let labels = decode_qname(payload, 12)?;
    let name = QueryName::from_wire_labels(labels).map_err(|_| "bad-qname")?;
    Ok(DecodedQuery {
        name,
        src_ip,
        dst_ip,
        is_response: flags & 0x8000 != 0,
    })
}

/// Decode a (possibly compressed) QNAME starting at `start` inside the
/// DNS message, following RFC 1035 §4.1.4 pointers.
fn decode_qname(msg: &[u8], start: usize) -> std::result::Result<Vec<Vec<u8>>, &'static str> {
    let mut labels = Vec::new();
    let mut offset = start;
    let mut hops = 0usize;
    let mut name_len = 0usize;
    loop {
        let len = *msg.get(offset).ok_or("qname-overrun")? as usize;
        if len == 0 {
            break;
        }
        match len & 0xc0 {
            0xc0 => {
                hops += 1;
                if hops > MAX_POINTER_HOPS {
                    return Err("pointer-loop");
                }
                let low = *msg.get(offset + 1).ok_or("qname-overrun")? as usize;
                offset = (len & 0x3f) << 8 | low;
            }
            0x00 => {
                let label = msg
                    .get(offset + 1..offset + 1 + len)
                    .ok_or("qname-overrun")?;
                name_len += label.len() + usize::from(!labels.is_empty());
                if name_len > 253 {
                    return Err("bad-qname");
                }
                labels.push(label.to_vec());
                offset += 1 + len;
            }
            // 0x40 and 0x80 label types were never standardized
            _ => return Err("bad-qname"),
        }
    }
    Ok(labels)
}

impl<R: Read> Iterator for PcapReader<R> {
    type Item = QueryRecord;

    fn next(&mut self) -> Option<QueryRecord> {
        while !self.done {
            let (ts, body) = self.next_frame()?;
            let Some(body) = body else {
                continue; // already tallied (oversized)
            };
            match decode_packet(&body) {
                Ok(decoded) => {
                    self.stats.packets_dns += 1;
                    let seq = self.next_seq;
                    self.next_seq += 1;
                    let (direction, client_ip) = if decoded.is_response {
                        (Direction::Response, decoded.dst_ip)
                    } else {
                        (Direction::Query, decoded.src_ip)
                    };
                    return Some(QueryRecord {
                        name: decoded.name,
                        client_ip,
                        direction,
                        timestamp: ts,
                        seq,
                    });
                }
                Err(reason) => self.stats.skip(reason),
            }
        }
        None
    }
}

/// Decode a whole capture (see [`PcapReader`] for streaming use).
pub fn read_pcap<R: Read>(reader: R) -> Result<(Vec<QueryRecord>, IngestStats)> {
    let mut pcap = PcapReader::open(reader)?;
    let records: Vec<QueryRecord> = pcap.by_ref().collect();
    Ok((records, pcap.into_stats()))
}

/// Tally for plain-text domain-list ingestion.
#[derive(Debug, Clone, Copy, Default)]
pub struct ListStats {
    pub lines: u64,
    pub parsed: u64,
    pub skipped: u64,
}

/// Read the plain-text domain-list format: UTF-8, one name per line,
/// `#` comments and blank lines ignored. Unparseable names are skipped
/// and counted, matching the forgiving pcap path.
pub fn read_domain_list<R: BufRead>(reader: R) -> Result<(Vec<QueryRecord>, ListStats)> {
    let mut records = Vec::new();
    let mut stats = ListStats::default();
    for line in reader.lines() {
        let line = line?;
        stats.lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match QueryName::parse(trimmed) {
            Ok(name) => {
                records.push(QueryRecord::bare(name, stats.parsed));
                stats.parsed += 1;
            }
            Err(_) => stats.skipped += 1,
        }
    }
    Ok((records, stats))
}

fn ip_checksum(header: &[u8]) -> u16 {
    let mut sum = 0u32;
    for pair in header.chunks(2) {
        let word = u16::from_be_bytes([pair[0], *pair.get(1).unwrap_or(&0)]);
        sum += u32::from(word);
    }
    while sum >> 16 != 0 {
        sum = (sum & 0xffff) + (sum >> 16);
    }
    !(sum as u16)
}

/// One Ethernet/IPv4/UDP DNS frame for a record, honoring its
/// direction: queries travel client -> server, responses back.
fn build_frame(record: &QueryRecord) -> Vec<u8> {
    let mut dns = Vec::new();
    dns.extend_from_slice(&(record.seq as u16).to_be_bytes());
    let flags: u16 = match record.direction {
        Direction::Query => 0x0100,    // RD
        Direction::Response => 0x8180, // QR RD RA
    };
    dns.extend_from_slice(&flags.to_be_bytes());
    dns.extend_from_slice(&1u16.to_be_bytes()); // QDCOUNT
    dns.extend_from_slice(&[0, 0, 0, 0, 0, 0]); // AN/NS/AR
    for label in record.name.labels() {
        dns.push(label.len() as u8);
        dns.extend_from_slice(label);
    }
    dns.push(0);
    dns.extend_from_slice(&1u16.to_be_bytes()); // QTYPE A
    dns.extend_from_slice(&1u16.to_be_bytes()); // QCLASS IN

    let (src_ip, dst_ip, src_port, dst_port) = match record.direction {
        Direction::Query => (record.client_ip, SERVER_IP, CLIENT_PORT, 53),
        Direction::Response => (SERVER_IP, record.client_ip, 53, CLIENT_PORT),
    };

    let udp_len = (8 + dns.len()) as u16;
    let mut udp = Vec::new();
    udp.extend_from_slice(&src_port.to_be_bytes());
    udp.extend_from_slice(&dst_port.to_be_bytes());
    udp.extend_from_slice(&udp_len.to_be_bytes());
    udp.extend_from_slice(&0u16.to_be_bytes()); // checksum optional over IPv4
    udp.extend_from_slice(&dns);

    let total_len = (20 + udp.len()) as u16;
    let mut ip = Vec::new();
    ip.push(0x45);
    ip.push(0);
    ip.extend_from_slice(&total_len.to_be_bytes());
    ip.extend_from_slice(&(record.seq as u16).to_be_bytes());
    ip.extend_from_slice(&0u16.to_be_bytes());
    ip.push(64); // TTL
    ip.push(17); // UDP
    ip.extend_from_slice(&0u16.to_be_bytes()); // checksum placeholder
    ip.extend_from_slice(&src_ip.octets());
    ip.extend_from_slice(&dst_ip.octets());
    let checksum = ip_checksum(&ip);
    ip[10..12].copy_from_slice(&checksum.to_be_bytes());
    ip.extend_from_slice(&udp);

    let mut frame = Vec::with_capacity(14 + ip.len());
    frame.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x02]); // dst MAC
    frame.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x01]); // src MAC
    frame.extend_from_slice(&0x0800u16.to_be_bytes());
    frame.extend_from_slice(&ip);
    frame
}

/// Write a classic microsecond pcap holding one DNS frame per record.
pub fn write_pcap_with<W: Write>(
    mut w: W,
    records: &[QueryRecord],
    order: ByteOrder,
) -> Result<()> {
    let put32 = |buf: &mut Vec<u8>, v: u32| match order {
        ByteOrder::Little => buf.extend_from_slice(&v.to_le_bytes()),
        ByteOrder::Big => buf.extend_from_slice(&v.to_be_bytes()),
    };
    let put16 = |buf: &mut Vec<u8>, v: u16| match order {
        ByteOrder::Little => buf.extend_from_slice(&v.to_le_bytes()),
        ByteOrder::Big => buf.extend_from_slice(&v.to_be_bytes()),
    };
    let mut out = Vec::new();
    put32(&mut out, MAGIC_USEC);
    put16(&mut out, 2); // version 2.4
    put16(&mut out, 4);
    put32(&mut out, 0); // thiszone
    put32(&mut out, 0); // sigfigs
    put32(&mut out, 65535); // snaplen
    put32(&mut out, LINKTYPE_ETHERNET);
    for record in records {
        let frame = build_frame(record);
        put32(&mut out, record.timestamp.sec);
        put32(&mut out, record.timestamp.usec);
        put32(&mut out, frame.len() as u32);
        put32(&mut out, frame.len() as u32);
        out.extend_from_slice(&frame);
    }
    w.write_all(&out)?;
    Ok(())
}

/// [`write_pcap_with`] in little-endian file order.
pub fn write_pcap<W: Write>(w: W, records: &[QueryRecord]) -> Result<()> {
    write_pcap_with(w, records, ByteOrder::Little)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // ---------------------------------------------------------------
    // Hand-assembled capture bytes, independent of write_pcap, so the
    // reader and writer are checked against the format itself.
    // ---------------------------------------------------------------

    fn hand_global_header() -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&0xa1b2c3d4u32.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes());
        out.extend_from_slice(&4u16.to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&65535u32.to_le_bytes());
        out.extend_from_slice(&1u32.to_le_bytes());
        out
    }

    fn hand_dns_query_frame(qname_wire: &[u8], src: [u8; 4], dst: [u8; 4], qr: bool) -> Vec<u8> {
        let mut dns = vec![0xbe, 0xef];
        dns.extend_from_slice(if qr { &[0x81, 0x80] } else { &[0x01, 0x00] });
        dns.extend_from_slice(&[0, 1, 0, 0, 0, 0, 0, 0]);
        dns.extend_from_slice(qname_wire);
        dns.extend_from_slice(&[0, 1, 0, 1]);

        let udp_len = (8 + dns.len()) as u16;
        let mut udp = Vec::new();
        let (sp, dp): (u16, u16) = if qr { (53, 40000) } else { (40000, 53) };
        udp.extend_from_slice(&sp.to_be_bytes());
        udp.extend_from_slice(&dp.to_be_bytes());
        udp.extend_from_slice(&udp_len.to_be_bytes());
        udp.extend_from_slice(&[0, 0]);
        udp.extend_from_slice(&dns);

        let total = (20 + udp.len()) as u16;
        let mut ip = vec![0x45, 0x00];
        ip.extend_from_slice(&total.to_be_bytes());
        ip.extend_from_slice(&[0, 1, 0, 0, 64, 17, 0, 0]);
        ip.extend_from_slice(&src);
        ip.extend_from_slice(&dst);
        ip.extend_from_slice(&udp);

        let mut frame = vec![2, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0, 1, 0x08, 0x00];
        frame.extend_from_slice(&ip);
        frame
    }

    fn hand_record(ts_sec: u32, ts_usec: u32, frame: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&ts_sec.to_le_bytes());
        out.extend_from_slice(&ts_usec.to_le_bytes());
        out.extend_from_slice(&(frame.len() as u32).to_le_bytes());
        out.extend_from_slice(&(frame.len() as u32).to_le_bytes());
        out.extend_from_slice(frame);
        out
    }

    fn wire_name(name: &str) -> Vec<u8> {
        let mut out = Vec::new();
        for label in name.split('.') {
            out.push(label.len() as u8);
            out.extend_from_slice(label.as_bytes());
        }
        out.push(0);
        out
    }

    #[test]
    fn hand_assembled_query_round_trips() {
        let mut capture = hand_global_header();
        let frame = hand_dns_query_frame(&wire_name("abc.example.com"), [10, 1, 2, 3], [8, 8, 8, 8], false);
        capture.extend_from_slice(&hand_record(1600000000, 250, &frame));

        let (records, stats) = read_pcap(capture.as_slice()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].name.normalized(), b"abc.example.com");
        assert_eq!(records[0].direction, Direction::Query);
        assert_eq!(records[0].client_ip, Ipv4Addr::new(10, 1, 2, 3));
        assert_eq!(records[0].timestamp, Timestamp { sec: 1600000000, usec: 250 });
        assert_eq!(stats.packets_total, 1);
        assert_eq!(stats.packets_dns, 1);
        assert_eq!(stats.packets_skipped, 0);
    }

    #[test]
    fn response_direction_keys_on_destination() {
        let mut capture = hand_global_header();
        let frame = hand_dns_query_frame(&wire_name("x.org"), [8, 8, 8, 8], [10, 1, 2, 3], true);
        capture.extend_from_slice(&hand_record(0, 0, &frame));
        let (records, _) = read_pcap(capture.as_slice()).unwrap();
        assert_eq!(records[0].direction, Direction::Response);
        assert_eq!(records[0].client_ip, Ipv4Addr::new(10, 1, 2, 3));
    }

    #[test]
    fn uppercase_wire_name_is_normalized() {
        let mut capture = hand_global_header();
        let frame = hand_dns_query_frame(&wire_name("WWW.Example.COM"), [1, 1, 1, 1], [8, 8, 8, 8], false);
        capture.extend_from_slice(&hand_record(0, 0, &frame));
        let (records, _) = read_pcap(capture.as_slice()).unwrap();
        assert_eq!(records[0].name.normalized(), b"www.example.com");
        assert_eq!(records[0].name.raw(), b"WWW.Example.COM");
    }

    #[test]
    fn bad_magic_and_truncation() {
        assert!(matches!(
            read_pcap(&b"GIF89a nothing like a pcap"[..]),
            Err(Error::BadMagic(_))
        ));
        // nanosecond pcap and pcapng are rejected up front
        assert!(matches!(
            read_pcap(&0xa1b23c4du32.to_le_bytes()[..]),
            Err(Error::BadMagic(_))
        ));
        assert!(matches!(
            read_pcap(&0x0a0d0d0au32.to_le_bytes()[..]),
            Err(Error::BadMagic(_))
        ));
        assert!(matches!(read_pcap(&[][..]), Err(Error::TruncatedHeader)));
        assert!(matches!(
            read_pcap(&hand_global_header()[..20]),
            Err(Error::TruncatedHeader)
        ));
    }

    #[test]
    fn non_ethernet_linktype_fails_fast() {
        let mut header = hand_global_header();
        header[20..24].copy_from_slice(&101u32.to_le_bytes()); // raw IP
        assert!(matches!(
            read_pcap(header.as_slice()),
            Err(Error::UnsupportedLinkType(101))
        ));
    }

    #[test]
    fn non_udp_packets_are_counted_not_fatal() {
        let mut capture = hand_global_header();
        let good = hand_dns_query_frame(&wire_name("a.com"), [10, 0, 0, 1], [8, 8, 8, 8], false);
        capture.extend_from_slice(&hand_record(0, 0, &good));
        // middle packet: TCP (protocol 6)
        let mut tcp = good.clone();
        tcp[14 + 9] = 6;
        capture.extend_from_slice(&hand_record(0, 1, &tcp));
        let good2 = hand_dns_query_frame(&wire_name("b.com"), [10, 0, 0, 1], [8, 8, 8, 8], false);
        capture.extend_from_slice(&hand_record(0, 2, &good2));

        let (records, stats) = read_pcap(capture.as_slice()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(stats.packets_total, 3);
        assert_eq!(stats.packets_skipped, 1);
        assert_eq!(stats.skip_reasons.get("non-udp"), Some(&1));
        let seqs: Vec<u64> = records.iter().map(|r| r.seq).collect();
        assert_eq!(seqs, vec![0, 1]);
    }

    #[test]
    fn compression_pointer_is_followed() {
        // QNAME is a pointer to labels placed after the question
        let mut dns = vec![0, 1, 0x01, 0x00, 0, 1, 0, 0, 0, 0, 0, 0];
        dns.extend_from_slice(&[0xc0, 18]); // pointer to offset 18
        dns.extend_from_slice(&[0, 1, 0, 1]); // qtype/qclass
        dns.extend_from_slice(&wire_name("foo.bar")); // pointer target

        let mut udp = Vec::new();
        udp.extend_from_slice(&40000u16.to_be_bytes());
        udp.extend_from_slice(&53u16.to_be_bytes());
        udp.extend_from_slice(&((8 + dns.len()) as u16).to_be_bytes());
        udp.extend_from_slice(&[0, 0]);
        udp.extend_from_slice(&dns);
        let total = (20 + udp.len()) as u16;
        let mut ip = vec![0x45, 0x00];
        ip.extend_from_slice(&total.to_be_bytes());
        ip.extend_from_slice(&[0, 1, 0, 0, 64, 17, 0, 0, 10, 0, 0, 9, 8, 8, 8, 8]);
        ip.extend_from_slice(&udp);
        let mut frame = vec![2, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0, 1, 0x08, 0x00];
        frame.extend_from_slice(&ip);

        let mut capture = hand_global_header();
        capture.extend_from_slice(&hand_record(0, 0, &frame));
        let (records, stats) = read_pcap(capture.as_slice()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].name.normalized(), b"foo.bar");
        assert_eq!(stats.packets_skipped, 0);
    }

    #[test]
    fn pointer_loop_is_skipped() {
        // QNAME at offset 12 points at itself
        let qname: &[u8] = &[0xc0, 12];
        let mut dns = vec![0, 1, 0x01, 0x00, 0, 1, 0, 0, 0, 0, 0, 0];
        dns.extend_from_slice(qname);
        dns.extend_from_slice(&[0, 1, 0, 1]);
        let frame = {
            let mut udp = Vec::new();
            udp.extend_from_slice(&40000u16.to_be_bytes());
            udp.extend_from_slice(&53u16.to_be_bytes());
            udp.extend_from_slice(&((8 + dns.len()) as u16).to_be_bytes());
            udp.extend_from_slice(&[0, 0]);
            udp.extend_from_slice(&dns);
            let total = (20 + udp.len()) as u16;
            let mut ip = vec![0x45, 0x00];
            ip.extend_from_slice(&total.to_be_bytes());
            ip.extend_from_slice(&[0, 1, 0, 0, 64, 17, 0, 0, 10, 0, 0, 9, 8, 8, 8, 8]);
            ip.extend_from_slice(&udp);
            let mut f = vec![2, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0, 1, 0x08, 0x00];
            f.extend_from_slice(&ip);
            f
        };
        let mut capture = hand_global_header();
        capture.extend_from_slice(&hand_record(0, 0, &frame));
        let (records, stats) = read_pcap(capture.as_slice()).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.skip_reasons.get("pointer-loop"), Some(&1));
    }

    #[test]
    fn qname_overrun_is_skipped() {
        let mut capture = hand_global_header();
        // label length 40 with only 3 bytes behind it
        let frame = hand_dns_query_frame(&[40, b'a', b'b', b'c'], [1, 1, 1, 1], [8, 8, 8, 8], false);
        capture.extend_from_slice(&hand_record(0, 0, &frame));
        let (records, stats) = read_pcap(capture.as_slice()).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.skip_reasons.get("qname-overrun"), Some(&1));
    }

    #[test]
    fn truncated_final_record_is_tallied() {
        let mut capture = hand_global_header();
        let frame = hand_dns_query_frame(&wire_name("a.com"), [10, 0, 0, 1], [8, 8, 8, 8], false);
        capture.extend_from_slice(&hand_record(0, 0, &frame));
        let record = hand_record(0, 1, &frame);
        capture.extend_from_slice(&record[..record.len() - 5]);
        let (records, stats) = read_pcap(capture.as_slice()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(stats.skip_reasons.get("truncated-record"), Some(&1));
    }

    #[test]
    fn writer_reader_round_trip_with_directions_and_ips() {
        let names = ["a.example.com", "b.example.com", "tunnel.payload.net"];
        let records: Vec<QueryRecord> = names
            .iter()
            .enumerate()
            .map(|(i, text)| QueryRecord {
                name: QueryName::parse(text).unwrap(),
                client_ip: Ipv4Addr::new(10, 0, 0, 1 + i as u8),
                direction: if i % 2 == 0 { Direction::Query } else { Direction::Response },
                timestamp: Timestamp { sec: 100 + i as u32, usec: i as u32 },
                seq: i as u64,
            })
            .collect();
        for order in [ByteOrder::Little, ByteOrder::Big] {
            let mut buf = Vec::new();
            write_pcap_with(&mut buf, &records, order).unwrap();
            let (read, stats) = read_pcap(buf.as_slice()).unwrap();
            assert_eq!(read, records);
            assert_eq!(stats.packets_dns, 3);
            assert_eq!(stats.packets_skipped, 0);
        }
    }

    #[test]
    fn domain_list_basics() {
        let text = "a.com\nb.org\n# comment\n";
        let (records, stats) = read_domain_list(text.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].name.normalized(), b"a.com");
        assert_eq!(records[1].seq, 1);
        assert_eq!(stats.parsed, 2);
        assert_eq!(stats.skipped, 0);

        let (records, stats) = read_domain_list(&b""[..]).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.lines, 0);

        // a 300-byte name exceeds the 253-byte bound
        let long = format!("{}.com\n", "a".repeat(296));
        let (records, stats) = read_domain_list(long.as_bytes()).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.skipped, 1);
    }

    proptest! {
        /// Synthesizing a pcap from any name list and reading it back
        /// yields the same names in order.
        #[test]
        fn pcap_round_trip_any_names(texts in proptest::collection::vec("[a-z0-9]{1,20}(\\.[a-z0-9]{1,20}){0,3}", 1..40)) {
            let records: Vec<QueryRecord> = texts
                .iter()
                .enumerate()
                .map(|(i, t)| QueryRecord::bare(QueryName::parse(t).unwrap(), i as u64))
                .collect();
            let mut buf = Vec::new();
            write_pcap(&mut buf, &records).unwrap();
            let (read, stats) = read_pcap(buf.as_slice()).unwrap();
            prop_assert_eq!(read.len(), records.len());
            for (got, want) in read.iter().zip(&records) {
                prop_assert_eq!(got.name.normalized(), want.name.normalized());
                prop_assert_eq!(got.seq, want.seq);
            }
            prop_assert_eq!(stats.packets_dns as usize, records.len());
        }

        /// Arbitrary bytes never panic the reader.
        #[test]
        fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..600)) {
            if let Ok((records, stats)) = read_pcap(bytes.as_slice()) {
                prop_assert!(stats.packets_dns + stats.packets_skipped <= stats.packets_total);
                prop_assert_eq!(records.len() as u64, stats.packets_dns);
            }
        }

        /// Mutating one byte of a valid capture is at worst a skip.
        #[test]
        fn mutated_capture_never_panics(pos in 24usize..200, val in any::<u8>()) {
            let records: Vec<QueryRecord> = (0..3)
                .map(|i| QueryRecord::bare(QueryName::parse(&format!("h{i}.example.com")).unwrap(), i as u64))
                .collect();
            let mut buf = Vec::new();
            write_pcap(&mut buf, &records).unwrap();
            if pos < buf.len() {
                buf[pos] = val;
            }
            if let Ok((records, stats)) = read_pcap(buf.as_slice()) {
                prop_assert_eq!(records.len() as u64, stats.packets_dns);
            }
        }
    }
}
