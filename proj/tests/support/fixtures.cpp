#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>

#include "synfact/common/rng.hpp"
#include <stdexcept>

#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

namespace synfact::testing {

namespace fs = std::filesystem;

namespace {

struct Bank {
  const char* const* places;
  std::size_t n_places;
  const char* const* people;
  std::size_t n_people;
  const char* const* kinds;
  std::size_t n_kinds;
  const char* const* sentences;  // templates with {T} {P} {Q} {Y} {N} {K}
  std::size_t n_sentences;
  const char* const* headings;
  std::size_t n_headings;
  const char* category;
  const char* file;
  const char* redirect;
  const char* talk_ns;
};

#define SYNFACT_N(a) (sizeof(a) / sizeof((a)[0]))

const char* const kEnPlaces[] = {"Lisbon", "Cork", "Graz", "Tampere", "Valencia", "Leeds", "Bergen", "Porto",
                                 "Utrecht", "Brno", "Aarhus", "Turin"};
const char* const kEnPeople[] = {"Margaret Hale", "Thomas Whitby", "Elena Ward", "Samuel Reyes", "Clara Benton",
                                 "Dr. Arthur Lowell", "St. John Morley", "Ruth Okafor"};
const char* const kEnKinds[] = {"river", "cathedral", "railway station", "university", "festival", "bridge",
                                "museum", "harbour", "observatory", "library"};
const char* const kEnSentences[] = {
    "The {K} {T} was founded in {Y} by [[{P}]] near the centre of [[{Q}]].",
    "It is the largest {K} in the region and receives about {N},000 visitors every year.",
    "In {Y}, the building was extended with a northern wing designed by {P}.",
    "The {K} lies {N} kilometres west of [[{Q}|the old town]] and is served by regular buses.",
    "According to the 2011 census, the surrounding district had {N},400 residents.",
    "During the war the site was used as a depot, and it reopened to the public in {Y}.",
    "Its main hall is {N} metres long, which makes it longer than any comparable hall in [[{Q}]].",
    "'''{T}''' is a {K} in [[{Q}]], known for its stone facade and its annual spring fair.",
    "The collection includes more than {N} manuscripts, several of which date from the 14th century.",
    "{P} wrote that the {K} was \"the quiet heart of {Q}\" in a letter published in {Y}.",
    "A restoration project costing {N} million euros was completed in {Y}.",
    "The first director, {P}, served from {Y} until his retirement.",
    "Local tradition holds that the name comes from an older word for a river crossing.",
    "Since {Y} the {K} has been listed as a protected monument by the national heritage agency.",
};
const char* const kEnHeadings[] = {"History", "Architecture", "Collections", "Transport", "Legacy"};

const char* const kEsPlaces[] = {"Cuenca", "Salamanca", "Mérida", "Huesca", "Cáceres", "Lugo", "Jaén", "Soria",
                                 "Teruel", "Zamora"};
const char* const kEsPeople[] = {"María Castillo", "José Ferrer", "Lucía Navarro", "Sr. Andrés Molina",
                                 "Carmen Ibáñez", "Dr. Julián Robles", "Pilar Esteve"};
const char* const kEsKinds[] = {"puente", "catedral", "museo", "teatro", "mercado", "castillo", "monasterio",
                                "biblioteca"};
const char* const kEsSentences[] = {
    "El {K} de {T} fue construido en {Y} por orden de [[{P}]] en el centro de [[{Q}]].",
    "Es el {K} más antiguo de la provincia y recibe cerca de {N}.000 visitantes al año.",
    "En {Y} se añadió una nueva ala diseñada por el arquitecto {P}.",
    "El edificio se encuentra a {N} kilómetros de [[{Q}|la ciudad vieja]] y cuenta con acceso por carretera.",
    "Según el censo de 2011, el barrio tenía {N}.400 habitantes.",
    "Durante la guerra civil el recinto sirvió como almacén, y volvió a abrir sus puertas en {Y}.",
    "Su nave principal mide {N} metros de largo, lo que la hace más larga que cualquier otra de [[{Q}]].",
    "'''{T}''' es un {K} situado en [[{Q}]], conocido por su fachada de piedra y su feria de primavera.",
    "La colección reúne más de {N} manuscritos, algunos de ellos del siglo XIV.",
    "{P} describió el {K} como «el corazón tranquilo de {Q}» en una carta publicada en {Y}.",
    "La restauración, que costó {N} millones de euros, terminó en {Y}.",
    "Su primer director, {P}, ocupó el cargo desde {Y} hasta su jubilación.",
    "La tradición local sostiene que el nombre procede de una antigua palabra para designar un vado.",
    "Desde {Y} el {K} está declarado Bien de Interés Cultural.",
};
const char* const kEsHeadings[] = {"Historia", "Arquitectura", "Colecciones", "Acceso", "Legado"};

const char* const kDePlaces[] = {"Erfurt", "Passau", "Görlitz", "Lübeck", "Bamberg", "Kassel", "Tübingen",
                                 "Wismar", "Goslar", "Jena"};
const char* const kDePeople[] = {"Johanna Keller", "Friedrich Brandt", "Dr. Helene Vogt", "Martin Schäfer",
                                 "Anna Lindqvist", "Prof. Karl Ebert", "Greta Hoffmann"};
const char* const kDeKinds[] = {"Brücke", "Kirche", "Bibliothek", "Sternwarte", "Burg", "Mühle", "Schule",
                                "Bahnhof"};
const char* const kDeSentences[] = {
    "Die {K} {T} wurde {Y} von [[{P}]] im Zentrum von [[{Q}]] errichtet.",
    "Sie ist die größte {K} der Region und zählt jährlich etwa {N}.000 Besucher.",
    "Im Jahr {Y} wurde der Bau um einen Nordflügel nach Plänen von {P} erweitert.",
    "Die {K} liegt {N} Kilometer westlich von [[{Q}|der Altstadt]] und ist mit dem Bus erreichbar.",
    "Nach der Volkszählung von 2011 hatte der Stadtteil {N}.400 Einwohner.",
    "Während des Krieges diente das Gelände als Lager, bevor es am 3. Oktober {Y} wieder eröffnet wurde.",
    "Der Hauptsaal ist {N} Meter lang und damit länger als jeder vergleichbare Saal in [[{Q}]].",
    "'''{T}''' ist eine {K} in [[{Q}]], bekannt für ihre Sandsteinfassade und den Frühjahrsmarkt.",
    "Die Sammlung umfasst über {N} Handschriften, darunter z. B. Stücke aus dem 14. Jh. und später.",
    "{P} nannte die {K} in einem {Y} veröffentlichten Brief „das stille Herz von {Q}“.",
    "Die Sanierung kostete {N} Mio. Euro und wurde {Y} abgeschlossen.",
    "Der erste Leiter, {P}, war von {Y} bis zu seinem Ruhestand im Amt.",
    "Der Name geht nach örtlicher Überlieferung auf ein altes Wort für eine Furt zurück.",
    "Seit {Y} steht die {K} unter Denkmalschutz.",
};
const char* const kDeHeadings[] = {"Geschichte", "Architektur", "Sammlung", "Verkehr", "Rezeption"};

const Bank kEn{kEnPlaces,    SYNFACT_N(kEnPlaces),    kEnPeople,   SYNFACT_N(kEnPeople), kEnKinds,
               SYNFACT_N(kEnKinds), kEnSentences, SYNFACT_N(kEnSentences), kEnHeadings, SYNFACT_N(kEnHeadings),
               "Category",   "File",                  "#REDIRECT", "Talk"};
const Bank kEs{kEsPlaces,    SYNFACT_N(kEsPlaces),    kEsPeople,   SYNFACT_N(kEsPeople), kEsKinds,
               SYNFACT_N(kEsKinds), kEsSentences, SYNFACT_N(kEsSentences), kEsHeadings, SYNFACT_N(kEsHeadings),
               "Categoría",  "Archivo",               "#REDIRECCIÓN", "Discusión"};
const Bank kDe{kDePlaces,    SYNFACT_N(kDePlaces),    kDePeople,   SYNFACT_N(kDePeople), kDeKinds,
               SYNFACT_N(kDeKinds), kDeSentences, SYNFACT_N(kDeSentences), kDeHeadings, SYNFACT_N(kDeHeadings),
               "Kategorie",  "Datei",                 "#WEITERLEITUNG", "Diskussion"};

const Bank& bank_for(const std::string& lang) {
  if (lang == "es") return kEs;
  if (lang == "de") return kDe;
  return kEn;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + s.size() / 8);
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

class ArticleWriter {
 public:
  ArticleWriter(const Bank& bank, Rng& rng) : b_(bank), rng_(rng) {}

  const char* pick(const char* const* items, std::size_t n) { return items[rng_.below(n)]; }
  int between(int lo, int hi) {
    return static_cast<int>(rng_.between(static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)));
  }

  std::string sentence(const std::string& title, const std::string& place, const std::string& kind) {
    std::string s = pick(b_.sentences, b_.n_sentences);
    replace_all(s, "{T}", title);
    replace_all(s, "{K}", kind);
    replace_all(s, "{Q}", between(0, 3) == 0 ? std::string(pick(b_.places, b_.n_places)) : place);
    replace_all(s, "{P}", pick(b_.people, b_.n_people));
    replace_all(s, "{Y}", std::to_string(between(1790, 2015)));
    replace_all(s, "{N}", std::to_string(between(2, 95)));
    // Sprinkle references and formatting the way real articles do.
    const int r = between(0, 9);
    if (r == 0) s += "<ref>{{cite web |url=https://example.org/a" + std::to_string(between(1, 999)) +
                     " |title=Record |date=2019}}</ref>";
    else if (r == 1) s += "<ref name=\"h" + std::to_string(between(1, 9)) + "\" />";
    else if (r == 2) s += "{{citation needed|date=May 2020}}";
    else if (r == 3) s = "''" + s.substr(0, s.size() - 1) + "''.";
    return s;
  }

  std::string article(const std::string& title, std::size_t target_bytes) {
    const std::string place = pick(b_.places, b_.n_places);
    const std::string kind = pick(b_.kinds, b_.n_kinds);
    std::string w;
    w += "{{Infobox building\n| name = " + title + "\n| location = [[" + place + "]]\n| opened = {{start date|" +
         std::to_string(between(1800, 1990)) + "|5|1}}\n| image = Example.jpg\n}}\n";
    w += "'''" + title + "''' ";
    std::string lead = sentence(title, place, kind);
    if (lead.rfind("'''", 0) == 0) lead = lead.substr(lead.find("'''", 3) + 4);
    w += lead + " " + sentence(title, place, kind) + " " + sentence(title, place, kind) + "\n\n";
    w += sentence(title, place, kind) + " &nbsp;" + sentence(title, place, kind) + "\n";
    int section = 0;
    while (w.size() < target_bytes || section < 2) {
      w += "\n== " + std::string(b_.headings[section % b_.n_headings]) + " ==\n";
      const int paragraphs = between(1, 3);
      for (int p = 0; p < paragraphs; ++p) {
        const int n = between(2, 5);
        for (int i = 0; i < n; ++i) w += sentence(title, place, kind) + (i + 1 < n ? " " : "\n");
        if (between(0, 4) == 0) w += "<!-- editors: verify the figures above -->\n";
        w += "\n";
      }
      switch (between(0, 5)) {
        case 0:
          w += "[[" + std::string(b_.file) + ":View " + std::to_string(section) + ".jpg|thumb|left|A view of [[" +
               place + "]] in winter]]\n";
          break;
        case 1:
          w += "{| class=\"wikitable\"\n|-\n! Year !! Visitors\n|-\n| 2019 || " + std::to_string(between(1, 90)) +
               ",000\n|-\n| 2020 || {{n/a}}\n|}\n";
          break;
        case 2:
          w += "* " + sentence(title, place, kind) + "\n* " + sentence(title, place, kind) + "\n";
          break;
        case 3:
          w += "<math>x^2 + y^2 = z^2</math>\n";
          break;
        default:
          break;
      }
      ++section;
    }
    w += "\n== References ==\n{{Reflist}}\n\n[[" + std::string(b_.category) + ":" + place + "]]\n";
    w += "[[" + std::string(b_.category) + ":Buildings]]\n";
    return w;
  }

 private:
  const Bank& b_;
  Rng& rng_;
};

void append_page(std::string& xml, std::uint64_t id, const std::string& title, int ns, const std::string& text,
                 bool redirect_tag = false) {
  xml += "  <page>\n    <title>" + xml_escape(title) + "</title>\n    <ns>" + std::to_string(ns) +
         "</ns>\n    <id>" + std::to_string(id) + "</id>\n";
  if (redirect_tag) xml += "    <redirect title=\"Target\" />\n";
  xml += "    <revision>\n      <id>" + std::to_string(id * 10 + 1) +
         "</id>\n      <timestamp>2024-04-01T00:00:00Z</timestamp>\n      <contributor>\n        <username>Editor</username>\n        <id>7</id>\n      </contributor>\n";
  xml += "      <model>wikitext</model>\n      <format>text/x-wiki</format>\n";
  if (text.empty()) xml += "      <text bytes=\"0\" xml:space=\"preserve\" />\n";
  else xml += "      <text bytes=\"" + std::to_string(text.size()) + "\" xml:space=\"preserve\">" + xml_escape(text) + "</text>\n";
  xml += "      <sha1>0000000000000000000000000000000</sha1>\n    </revision>\n  </page>\n";
}

}  // namespace

std::string known_page_title(const std::string& language) {
  if (language == "es") return "Nevado del Huila";
  if (language == "de") return "Berbice-Niederländisch";
  return "Sundering of the Elves";
}

std::string known_page_wikitext(const std::string& language) {
  if (language == "es") {
    return "{{Ficha de montaña\n| nombre = Nevado del Huila\n| altitud = 5364\n}}\n"
           "El '''Nevado del Huila''' es un [[volcán]] situado en [[Colombia]].<ref>Instituto Geográfico.</ref> "
           "El nevado, que es el punto central del [[Parque Nacional Natural Nevado del Huila]], está dividido "
           "territorialmente entre los departamentos de [[Departamento del Huila|Huila]], [[Tolima]] y [[Cauca]], "
           "siendo su cima el punto más elevado de los tres. Su última erupción importante ocurrió en 2008.\n\n"
           "== Geografía ==\n"
           "El volcán forma parte de la [[Cordillera Central (Colombia)|Cordillera Central]] y mide 5364 metros "
           "sobre el nivel del mar. Sus glaciares han perdido una parte considerable de su superficie desde 1970.\n\n"
           "[[Categoría:Volcanes de Colombia]]\n";
  }
  if (language == "de") {
    return "'''Berbice-Niederländisch''' war eine [[Kreolsprache]] auf niederländischer Grundlage, die in "
           "[[Guyana]] gesprochen wurde. Die Sprache entstand im 17. Jahrhundert in der Kolonie [[Berbice]]. "
           "Durch den [[Londoner Vertrag (1814)|Britisch-Niederländischen Vertrag]] von [[1814]] fiel [[Berbice]] "
           "an [[Vereinigtes Königreich|Großbritannien]].<ref name=\"kouwenberg\" />\n\n"
           "== Geschichte ==\n"
           "Die letzte bekannte Sprecherin starb im Jahr 2005. Die Sprache wurde u. a. von der Linguistin Silvia "
           "Kouwenberg dokumentiert.\n\n"
           "[[Kategorie:Kreolsprache]]\n";
  }
  return "{{Short description|Division of the Elves in Tolkien's legendarium}}\n"
         "In [[J. R. R. Tolkien]]'s [[legendarium]], the [[Elf (Middle-earth)|Elves]] or '''Quendi''' are a "
         "sundered (divided) people. They awoke at Cuiviénen, far in the east of [[Middle-earth]]. The Valar "
         "invited them to live in Valinor, and many of them undertook the great journey west.\n\n"
         "== Divisions ==\n"
         "The Eldar were those who accepted the summons, while the Avari refused it. Among the Eldar, the Vanyar "
         "reached Aman first, followed by the Noldor and part of the Teleri.\n\n"
         "[[Category:Middle-earth Elves]]\n";
}

std::string make_dump_xml(const DumpOptions& o, DumpSummary* summary) {
  const Bank& b = bank_for(o.language);
  Rng rng(derive_seed(o.seed, "fixture/" + o.language));
  ArticleWriter writer(b, rng);
  DumpSummary s;
  std::string xml;
  xml += "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.11/\" version=\"0.11\" xml:lang=\"" +
         o.language + "\">\n  <siteinfo>\n    <sitename>Wikipedia</sitename>\n    <dbname>" + o.language +
         "wiki</dbname>\n    <namespaces>\n      <namespace key=\"0\" case=\"first-letter\" />\n      <namespace key=\"1\" case=\"first-letter\">" +
         b.talk_ns + "</namespace>\n    </namespaces>\n  </siteinfo>\n";
  std::uint64_t id = 1000;
  std::size_t written = 0;
  if (o.known_pages) {
    append_page(xml, ++id, known_page_title(o.language), 0, known_page_wikitext(o.language));
    ++s.page_elements;
    ++s.articles;
    ++written;
  }
  std::size_t serial = 0;
  while (written < o.articles) {
    const std::string title = std::string(writer.pick(b.places, b.n_places)) + " " +
                              writer.pick(b.kinds, b.n_kinds) + " " + std::to_string(++serial);
    const bool huge = o.huge_page_bytes > 0 && written == o.articles / 2;
    append_page(xml, ++id, title, 0, writer.article(title, huge ? o.huge_page_bytes : 600 + writer.between(0, 2400)));
    ++s.page_elements;
    ++s.articles;
    ++written;
    if (o.extras && written % 4 == 0) {
      append_page(xml, ++id, title + " (alt)", 0, std::string(b.redirect) + " [[" + title + "]]", true);
      ++s.page_elements;
    }
    if (o.extras && written % 5 == 0) {
      append_page(xml, ++id, std::string(b.talk_ns) + ":" + title, 1, "== Sources ==\nPlease add sources. ~~~~");
      ++s.page_elements;
    }
    if (o.extras && written % 9 == 0) {
      append_page(xml, ++id, title + " (stub)", 0, "");
      ++s.page_elements;
    }
  }
  xml += "</mediawiki>\n";
  if (summary) *summary = s;
  return xml;
}

DumpSummary write_dump(const fs::path& path, const DumpOptions& options) {
  DumpSummary s;
  const auto xml = make_dump_xml(options, &s);
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  const auto ext = path.extension();
  if (ext == ".gz" || ext == ".bz2") {
    boost::iostreams::filtering_ostream out;
    if (ext == ".gz") out.push(boost::iostreams::gzip_compressor());
    else out.push(boost::iostreams::bzip2_compressor());
    out.push(file);
    out.write(xml.data(), static_cast<std::streamsize>(xml.size()));
  } else {
    file.write(xml.data(), static_cast<std::streamsize>(xml.size()));
  }
  return s;
}

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          (prefix + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace synfact::testing
