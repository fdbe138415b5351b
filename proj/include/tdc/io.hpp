#ifndef TDC_IO_HPP
#define TDC_IO_HPP

#include <string>
#include <vector>

#include "tdc/seqdata.hpp"
#include "tdc/synth.hpp"

namespace tdc {

/// Round-trip-exact decimal formatting for doubles written to CSV.
std::string format_double(double value);

/// Event CSV: header `timestamp,attribute,value`, one event per row.
std::vector<EventRecord> read_event_csv(const std::string& path);
void write_event_csv(const std::string& path, const std::vector<EventRecord>& events);

/// Matrix CSV: first column attribute name, remaining columns lag 1..T (most
/// recent first); empty cell = missing.
SequenceMatrix read_matrix_csv(const std::string& path, double sentinel = kDefaultSentinel);
void write_matrix_csv(const std::string& path, const SequenceMatrix& matrix);

/// Series CSV: header row of attribute names; one time step per row, oldest
/// first; empty cell = missing.
struct Series {
    Mat values;  // D x N
    std::vector<std::string> attributes;
    double sentinel = kDefaultSentinel;
};

Series read_series_csv(const std::string& path, double sentinel = kDefaultSentinel);
void write_series_csv(const std::string& path, const Series& series);

/// Classification dataset: a directory holding events.csv
/// (sample,timestamp,attribute,value), labels.csv (sample,label) and
/// meta.json (attribute list and matrix width).
void write_event_dataset(const std::string& dir, const EventDataset& dataset);
EventDataset read_event_dataset(const std::string& dir);

/// FNV-1a 64-bit digest, used to pin bundled data files.
std::uint64_t fnv1a_file(const std::string& path);

}  // namespace tdc

#endif
