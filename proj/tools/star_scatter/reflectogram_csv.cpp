#include "reflectogram_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace star_scatter_cli
{

namespace ss = starscatter;

namespace
{

std::vector<std::string> SplitFields(const std::string &line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ','))
  {
    field.erase(0, field.find_first_not_of(" \t\r"));
    field.erase(field.find_last_not_of(" \t\r") + 1);
    out.push_back(field);
  }
  return out;
}

double ParseField(const std::string &s, bool &is_nan)
{
  is_nan = false;
  if (s == "NaN" || s == "nan" || s == "NAN")
  {
    is_nan = true;
    return 0.0;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
  {
    throw CsvError("not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string FormatNumber(double v)
{
  if (!std::isfinite(v))
  {
    return "NaN";
  }
  if (v == 0.0)
  {
    v = 0.0;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void WriteForwardCsv(std::ostream &out, std::span<const ss::ReflectogramEntry> rows,
                     std::size_t transmission_columns)
{
  out << "k,re_R1,im_R1,abs_R1";
  for (std::size_t j = 0; j < transmission_columns; j++)
  {
    out << ",re_T" << j + 2 << ",im_T" << j + 2;
  }
  out << '\n';
  const std::size_t data_cols = 3 + 2 * transmission_columns;
  for (const ss::ReflectogramEntry &r : rows)
  {
    out << FormatNumber(r.k);
    if (r.IsGap())
    {
      for (std::size_t c = 0; c < data_cols; c++)
      {
        out << ",NaN";
      }
      out << '\n';
      continue;
    }
    const ss::ScatteringCoefficients &c = *r.coefficients;
    out << ',' << FormatNumber(c.R1.real()) << ',' << FormatNumber(c.R1.imag()) << ','
        << FormatNumber(std::abs(c.R1));
    for (std::size_t j = 0; j < transmission_columns; j++)
    {
      out << ',' << FormatNumber(c.T[j].real()) << ',' << FormatNumber(c.T[j].imag());
    }
    out << '\n';
  }
}

void WritePlotCsv(std::ostream &out, std::span<const ss::ReflectogramEntry> rows)
{
  out << "k,abs_R1,arg_R1,g\n";
  for (const ss::ReflectogramEntry &r : rows)
  {
    out << FormatNumber(r.k);
    if (r.IsGap())
    {
      out << ",NaN,NaN,NaN\n";
      continue;
    }
    const ss::cplx R = r.coefficients->R1;
    out << ',' << FormatNumber(std::abs(R)) << ',' << FormatNumber(std::arg(R)) << ','
        << FormatNumber(ss::PoleIndicator(R)) << '\n';
  }
}

ReflectogramTable ReadReflectogramCsv(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw CsvError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line))
  {
    throw CsvError(path.string() + ": empty file");
  }
  const std::vector<std::string> header = SplitFields(line);
  const auto column = [&](const std::string &name)
  {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
    {
      throw CsvError(path.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ck = column("k"), cre = column("re_R1"), cim = column("im_R1");
  const std::size_t need = std::max({ck, cre, cim}) + 1;

  ReflectogramTable t;
  std::size_t lineno = 1;
  while (std::getline(in, line))
  {
    lineno++;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
    {
      continue;
    }
    const std::vector<std::string> f = SplitFields(line);
    if (f.size() < need)
    {
      throw CsvError(path.string() + ":" + std::to_string(lineno) + ": too few columns");
    }
    try
    {
      bool nk = false, nre = false, nim = false;
      const double k = ParseField(f[ck], nk);
      const double re = ParseField(f[cre], nre);
      const double im = ParseField(f[cim], nim);
      if (nk)
      {
        throw CsvError("k is NaN");
      }
      if (nre || nim)
      {
        t.gap_rows++;
        continue;
      }
      t.samples.push_back({k, {re, im}});
    }
    catch (const CsvError &e)
    {
      throw CsvError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

}  // namespace star_scatter_cli
