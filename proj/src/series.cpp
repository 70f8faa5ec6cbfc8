#include "nmep/series.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nmep/util.hpp"

namespace nmep {

void write_csv(std::ostream& out, const TimeSeries& s) {
    const std::size_t nobs = s.observable_names.size();
    const std::size_t nrec = s.times.size();

    // An imaginary column only appears when the observable actually has one.
    std::vector<bool> has_im(nobs, false);
    for (std::size_t k = 0; k < nobs; ++k)
        for (std::size_t r = 0; r < nrec; ++r)
            if (std::abs(s.observables[r][k].imag()) > 1e-10) { has_im[k] = true; break; }

    out << "t";
    for (std::size_t k = 0; k < nobs; ++k) {
        out << ',' << s.observable_names[k];
        if (has_im[k]) out << ',' << s.observable_names[k] << "_im";
    }
    out << ",n_distinct_members,total_count";
    const bool eig = !s.min_eigenvalues.empty();
    if (eig) out << ",min_eigenvalue";
    out << '\n';

    for (std::size_t r = 0; r < nrec; ++r) {
        out << format_double(s.times[r]);
        for (std::size_t k = 0; k < nobs; ++k) {
            out << ',' << format_double(s.observables[r][k].real());
            if (has_im[k]) out << ',' << format_double(s.observables[r][k].imag());
        }
        out << ',' << s.distinct_members[r] << ',' << s.total_counts[r];
        if (eig) out << ',' << format_double(s.min_eigenvalues[r]);
        out << '\n';
    }
    if (s.terminated)
        out << "# terminated: " << s.termination_reason << " at t="
            << format_double(s.termination_time) << '\n';
}

void write_csv_file(const std::string& path, const TimeSeries& s) {
    std::ofstream out(path);
    if (!out) throw Error(path + ": cannot open for writing");
    write_csv(out, s);
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw OutOfRange("no column named '" + name + "'");
}

CsvTable read_csv(std::istream& in, const std::string& name) {
    CsvTable t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            t.trailing_comment = text;
            continue;
        }
        auto fields = split(text, ',');
        if (!have_header) {
            for (auto& f : fields) t.columns.push_back(trim(f));
            have_header = true;
            continue;
        }
        if (fields.size() != t.columns.size())
            throw ParseError(name + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.columns.size()) + " fields, got " +
                             std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            try {
                row[i] = std::stod(trim(fields[i]));
            } catch (...) {
                throw ParseError(name + ":" + std::to_string(lineno) + ": bad number '" +
                                 trim(fields[i]) + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(name + ": empty CSV");
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return read_csv(in, path);
}

} // namespace nmep
