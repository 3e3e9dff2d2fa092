#ifndef STAR_SCATTER_REFLECTOGRAM_CSV_HPP
#define STAR_SCATTER_REFLECTOGRAM_CSV_HPP

#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <starscatter/inversion.hpp>
#include <starscatter/scattering.hpp>

namespace star_scatter_cli
{

class CsvError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// 12 significant digits, "NaN" for non-finite values, no negative zero.
std::string FormatNumber(double v);

// k,re_R1,im_R1,abs_R1[,re_T2,im_T2,...]; gaps are written as NaN rows.
void WriteForwardCsv(std::ostream &out, std::span<const starscatter::ReflectogramEntry> rows,
                     std::size_t transmission_columns);

// k,abs_R1,arg_R1,g with g = 2 Im(1/(1+R1)).
void WritePlotCsv(std::ostream &out, std::span<const starscatter::ReflectogramEntry> rows);

struct ReflectogramTable
{
  std::vector<starscatter::ReflectogramSample> samples;
  std::size_t gap_rows = 0;
};

// Reads the k, re_R1 and im_R1 columns of a forward CSV. Rows with NaN are counted as gaps
// and skipped.
ReflectogramTable ReadReflectogramCsv(const std::filesystem::path &path);

}  // namespace star_scatter_cli

#endif  // STAR_SCATTER_REFLECTOGRAM_CSV_HPP
